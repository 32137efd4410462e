"""Experiment runner: reproduce the numerical study as CSV tables.

Subcommands
-----------
design           solve the closed-form scheme, write the solution file
outage           outage vs threshold for all schemes (analytical + MC)
capacity-vs-n    ergodic capacity sweep over surface sizes
capacity-vs-mu   ergodic capacity sweep over the direct/indirect ratio
capacity-vs-theta  capacity sweep over the departure-angle separation
validate         distribution and identity checks; nonzero exit on failure

Configuration is a TOML file of flat key = value sections; every key has a
baked-in default matching the reference scenario (m=4, n=32, k=5, gamma=0 dB,
mu=5 dB), so an empty file reproduces it.  Unknown keys are rejected.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python 3.10
    import tomli as _toml

from . import montecarlo
from .analysis import ergodic_capacity_analytical, outage_analytical, rice_gain_stats
from .beamforming import (
    SchemeTag,
    build_quadratic_form,
    compute_weights,
    design_max_mean_snr,
    design_proposed,
    lower_bound_mean_snr,
    mean_snr_exact,
    phase_shift_for,
)
from .channel import SystemConfig, build_los, link_budget_from_db, rician_coefficients
from .errors import (
    ConvergenceError,
    DegenerateBeamError,
    DegenerateMatrixError,
    DegenerateStatsError,
    IntegrationError,
    InvalidParameterError,
    InvalidStatsError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

_NUMERICAL_ERRORS = (
    ConvergenceError,
    DegenerateBeamError,
    DegenerateMatrixError,
    DegenerateStatsError,
    IntegrationError,
)


class ConfigError(ValueError):
    """Config file cannot be parsed or contains invalid entries."""


_DEFAULTS = {
    "system": {
        "m": 4,
        "n": 32,
        "k": 5.0,
        "theta_dd": 0.0,
        "theta_di1": math.pi / 4,
        "theta_di2": 8 * math.pi / 5,
        "theta_ai1": 0.0,
        "gamma_db": 0.0,
        "mu_db": 5.0,
    },
    "simulation": {
        "sweep_samples": 100_000,
        "outage_samples": 1_000_000,
        "seed": 20240,
        "workers": 1,
    },
    "sweeps": {
        "n_values": [8, 16, 32, 64],
        "mu_db_values": [0.0, 2.0, 4.0, 6.0, 8.0, 10.0],
        "theta_start": 0.0,
        "theta_stop": math.pi / 2,
        "theta_step": math.pi / 16,
        "beta_db_start": -10.0,
        "beta_db_stop": 30.0,
        "beta_db_step": 1.0,
    },
    "output": {
        "directory": "results",
    },
}

_INT_KEYS = {"m", "n", "sweep_samples", "outage_samples", "seed", "workers"}
_LIST_KEYS = {"n_values", "mu_db_values"}
_STR_KEYS = {"directory"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment settings."""

    system: SystemConfig
    sweep_samples: int
    outage_samples: int
    seed: int
    workers: int
    n_values: tuple[int, ...]
    mu_db_values: tuple[float, ...]
    theta_start: float
    theta_stop: float
    theta_step: float
    beta_grid_db: tuple[float, ...]
    output_dir: Path


def _coerce(section: str, key: str, value):
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key} must be a string, got {value!r}")
        return value
    if key in _LIST_KEYS:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{section}.{key} must be a nonempty list of numbers")
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"{section}.{key} must contain numbers only")
        return list(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if key in _INT_KEYS:
        if int(value) != value:
            raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read a TOML config; missing keys fall back to the reference defaults."""
    merged = {section: dict(values) for section, values in _DEFAULTS.items()}
    if path is not None:
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            data = _toml.loads(raw.decode("utf-8"))
        except (_toml.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        for section, values in data.items():
            if section not in merged:
                raise ConfigError(f"unknown section [{section}] in {path}")
            if not isinstance(values, dict):
                raise ConfigError(f"[{section}] must be a table of key = value entries")
            for key, value in values.items():
                if key not in merged[section]:
                    raise ConfigError(f"unknown key '{section}.{key}' in {path}")
                merged[section][key] = _coerce(section, key, value)

    sysd = merged["system"]
    try:
        gamma, mu = link_budget_from_db(sysd["gamma_db"], sysd["mu_db"])
        system = SystemConfig(
            m=sysd["m"],
            n=sysd["n"],
            k=sysd["k"],
            theta_dd=sysd["theta_dd"],
            theta_di1=sysd["theta_di1"],
            theta_di2=sysd["theta_di2"],
            theta_ai1=sysd["theta_ai1"],
            gamma=gamma,
            mu=mu,
        )
    except InvalidParameterError as exc:
        raise ConfigError(f"invalid [system] entry: {exc}") from exc

    sim = merged["simulation"]
    sw = merged["sweeps"]
    if sim["sweep_samples"] < 1 or sim["outage_samples"] < 1:
        raise ConfigError("sample counts must be >= 1")
    if sim["workers"] < 1:
        raise ConfigError("simulation.workers must be >= 1")
    if not (0 <= sim["seed"] < 2**64):
        raise ConfigError("simulation.seed must fit in an unsigned 64-bit integer")
    if sw["beta_db_step"] <= 0 or sw["beta_db_stop"] < sw["beta_db_start"]:
        raise ConfigError("sweeps.beta_db_* must describe an increasing grid")
    if sw["theta_step"] <= 0 or sw["theta_stop"] < sw["theta_start"]:
        raise ConfigError("sweeps.theta_* must describe an increasing grid")
    n_steps = int(round((sw["beta_db_stop"] - sw["beta_db_start"]) / sw["beta_db_step"]))
    beta_grid = tuple(sw["beta_db_start"] + i * sw["beta_db_step"] for i in range(n_steps + 1))
    if any(int(v) != v or v < 1 for v in sw["n_values"]):
        raise ConfigError("sweeps.n_values must be positive integers")

    return ExperimentConfig(
        system=system,
        sweep_samples=sim["sweep_samples"],
        outage_samples=sim["outage_samples"],
        seed=sim["seed"],
        workers=sim["workers"],
        n_values=tuple(int(v) for v in sw["n_values"]),
        mu_db_values=tuple(float(v) for v in sw["mu_db_values"]),
        theta_start=sw["theta_start"],
        theta_stop=sw["theta_stop"],
        theta_step=sw["theta_step"],
        beta_grid_db=beta_grid,
        output_dir=Path(merged["output"]["directory"]),
    )


def _fmt(x: float) -> str:
    """Full-precision, locale-independent decimal text."""
    return repr(float(x))


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{float(z.real)!r}{sign}{float(abs(z.imag))!r}j"


def _write_csv(path: Path, header: list[str], rows: list[list[float]]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _theta_grid(cfg: ExperimentConfig) -> list[float]:
    count = int(round((cfg.theta_stop - cfg.theta_start) / cfg.theta_step))
    return [cfg.theta_start + i * cfg.theta_step for i in range(count + 1)]


def cmd_design(cfg: ExperimentConfig, out_dir: Path) -> int:
    """Solve the closed-form design and write a key = value solution file."""
    system = cfg.system
    los = build_los(system)
    solution = design_proposed(system)
    f, psi = solution.f, solution.psi
    norm_err = abs(np.linalg.norm(f) - 1.0)
    mod_err = float(np.abs(np.abs(psi) - 1.0).max())
    if norm_err > 1e-10 or mod_err > 1e-10:
        raise ConvergenceError("solution violates its constraints", residual=max(norm_err, mod_err))
    form = build_quadratic_form(los, compute_weights(system))
    quadratic = float(np.vdot(f, form.Z @ f).real)
    mean_snr = mean_snr_exact(f, psi, system, los)
    stats = rice_gain_stats(solution, system, los)

    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "solution.txt"
    lines = [
        f"scheme = {solution.scheme_tag.value}",
        f"m = {system.m}",
        f"n = {system.n}",
        f"quadratic_objective = {_fmt(quadratic)}",
        f"mean_snr_exact = {_fmt(mean_snr)}",
        f"nu = {_fmt(stats.nu)}",
        f"sigma = {_fmt(stats.sigma)}",
    ]
    lines += [f"f_{i} = {_fmt_complex(v)}" for i, v in enumerate(f)]
    lines += [f"psi_{i} = {_fmt_complex(v)}" for i, v in enumerate(psi)]
    path.write_text("\n".join(lines) + "\n")

    print(f"closed-form design for m={system.m}, n={system.n}, k={system.k:g}")
    print(f"  quadratic objective  {quadratic:.6f}")
    print(f"  exact mean SNR       {mean_snr:.6f}")
    print(f"  gain stats           nu={stats.nu:.6f} sigma={stats.sigma:.6f}")
    print(f"  solution written to  {path}")
    return EXIT_OK


def read_solution_file(path: str | Path) -> dict:
    """Parse a solution file back into scalars and complex arrays."""
    entries = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    m = int(entries["m"])
    n = int(entries["n"])
    return {
        "scheme": entries["scheme"],
        "m": m,
        "n": n,
        "quadratic_objective": float(entries["quadratic_objective"]),
        "mean_snr_exact": float(entries["mean_snr_exact"]),
        "nu": float(entries["nu"]),
        "sigma": float(entries["sigma"]),
        "f": np.array([complex(entries[f"f_{i}"]) for i in range(m)]),
        "psi": np.array([complex(entries[f"psi_{i}"]) for i in range(n)]),
    }


OUTAGE_HEADER = [
    "beta_db",
    "pout_analytical",
    "pout_mc_proposed",
    "se_proposed",
    "pout_mc_maxmean",
    "se_maxmean",
    "pout_mc_maxsnr",
    "se_maxsnr",
]

CAPACITY_HEADER = [
    "sweep_value",
    "ec_analytical_proposed",
    "ec_mc_proposed",
    "se_proposed",
    "ec_mc_maxmean",
    "se_maxmean",
    "ec_mc_maxsnr",
    "se_maxsnr",
]

ALL_SCHEMES = frozenset({SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR, SchemeTag.MAX_SNR})


def cmd_outage(cfg: ExperimentConfig, out_dir: Path, samples: int, workers: int) -> int:
    """Outage vs threshold: analytical curve plus Monte Carlo for all schemes."""
    system = cfg.system
    los = build_los(system)
    stats = rice_gain_stats(design_proposed(system), system, los)
    plan = montecarlo.SimulationPlan(
        n_samples=samples,
        seed=cfg.seed,
        beta_grid_db=cfg.beta_grid_db,
        scheme_set=ALL_SCHEMES,
    )
    result = montecarlo.simulate(plan, system, los, workers=workers)
    rows = []
    for j, beta_db in enumerate(cfg.beta_grid_db):
        beta = 10.0 ** (beta_db / 10.0)
        row = [beta_db, outage_analytical(beta, stats, system.gamma)]
        for tag in (SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR, SchemeTag.MAX_SNR):
            emp = result.per_scheme[tag]
            row += [emp.outage[j], emp.outage_se[j]]
        rows.append(row)
    path = out_dir / "outage.csv"
    _write_csv(path, OUTAGE_HEADER, rows)
    print(f"outage table ({samples} samples, seed {cfg.seed}) written to {path}")
    return EXIT_OK


def _capacity_rows(
    cfg: ExperimentConfig,
    configs: list[tuple[float, SystemConfig]],
    samples: int,
    workers: int,
) -> list[list[float]]:
    rows = []
    for sweep_value, system in configs:
        los = build_los(system)
        stats = rice_gain_stats(design_proposed(system), system, los)
        ec_analytical = ergodic_capacity_analytical(stats, system.gamma)
        plan = montecarlo.SimulationPlan(
            n_samples=samples,
            seed=cfg.seed,
            beta_grid_db=(),
            scheme_set=ALL_SCHEMES,
        )
        result = montecarlo.simulate(plan, system, los, workers=workers)
        row = [sweep_value, ec_analytical]
        for tag in (SchemeTag.PROPOSED, SchemeTag.MAX_MEAN_SNR, SchemeTag.MAX_SNR):
            emp = result.per_scheme[tag]
            row += [emp.capacity, emp.capacity_se]
        rows.append(row)
    return rows


def cmd_capacity_sweep(
    cfg: ExperimentConfig,
    sweep: str,
    out_dir: Path,
    samples: int,
    workers: int,
) -> int:
    """Capacity sweep over n, mu, or the departure-angle separation theta."""
    system = cfg.system
    if sweep == "n":
        configs = [(float(v), dataclasses.replace(system, n=v)) for v in cfg.n_values]
    elif sweep == "mu":
        configs = [
            (mu_db, dataclasses.replace(system, mu=10.0 ** (mu_db / 10.0)))
            for mu_db in cfg.mu_db_values
        ]
    elif sweep == "theta":
        configs = [
            (theta, dataclasses.replace(system, theta_di1=system.theta_dd + theta))
            for theta in _theta_grid(cfg)
        ]
    else:
        raise ConfigError(f"unknown sweep kind {sweep!r}")
    rows = _capacity_rows(cfg, configs, samples, workers)
    path = out_dir / f"capacity_vs_{sweep}.csv"
    _write_csv(path, CAPACITY_HEADER, rows)
    print(f"capacity sweep over {sweep} ({samples} samples/point) written to {path}")
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig, out_dir: Path, samples: int) -> int:
    """Run distribution and identity checks; write a report, exit 4 on failure."""
    system = cfg.system
    los = build_los(system)
    lines = []
    failed = False

    fit = montecarlo.validate_gain_distribution(system, los, samples, cfg.seed)
    if fit.degenerate:
        lines.append(f"SKIP gain_distribution: {fit.reason}")
    else:
        status = "PASS" if fit.passed else "FAIL"
        lines.append(
            f"{status} gain_distribution: KS={fit.statistic:.6f} "
            f"critical={fit.critical_value:.6f} n={fit.n_samples}"
        )
        failed |= not fit.passed

    moments = montecarlo.validate_gain_decomposition(system, los, samples, cfg.seed)
    for check in moments.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(
            f"{status} {check.name}: measured={check.measured:.6g} "
            f"expected={check.expected:.6g} rel_err={check.rel_err:.3e}"
        )
    failed |= not moments.passed

    for name, ok, detail in _identity_checks(system, los):
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed |= not ok

    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validation.txt"
    path.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"validation report written to {path}")
    return EXIT_VALIDATION if failed else EXIT_OK


def _identity_checks(system: SystemConfig, los):
    """Deterministic structure checks on random unit beams and the solutions.

    Yields (name, passed, detail) tuples; tolerances are relative 1e-9 except
    where the solution constraints themselves demand 1e-10.
    """
    rng = np.random.default_rng(0xC0FFEE)
    kappa = rician_coefficients(system.k)
    kl = kappa.kappa_l
    weights = compute_weights(system)
    e0 = los.E[0]

    worst = {
        "row_gains_equal": 0.0,
        "cascade_energy": 0.0,
        "alignment_expansion": 0.0,
        "bound_gap_is_cross_term": 0.0,
        "cross_term_factorizes": 0.0,
    }
    for _ in range(200):
        f = rng.standard_normal(system.m) + 1j * rng.standard_normal(system.m)
        f /= np.linalg.norm(f)
        Ef = los.E @ f
        e0f = abs(Ef[0])
        gf = abs(los.g_bar @ f)
        scale = max(e0f**2, 1e-30)
        worst["row_gains_equal"] = max(
            worst["row_gains_equal"], float(np.abs(np.abs(Ef) - e0f).max()) / max(e0f, 1e-30)
        )
        worst["cascade_energy"] = max(
            worst["cascade_energy"],
            abs(np.linalg.norm(Ef) ** 2 - system.n * e0f**2) / (system.n * scale),
            abs(np.linalg.norm(los.H_bar @ f) ** 2 - system.n * e0f**2) / (system.n * scale),
        )
        psi = phase_shift_for(f, los)
        lhs = abs(kl**2 * (psi @ Ef) + system.mu * kl * (los.g_bar @ f)) ** 2
        rhs = (
            system.n**2 * kl**4 * e0f**2
            + system.mu**2 * kl**2 * gf**2
            + 2 * system.n * kl**3 * system.mu * e0f * gf
        )
        worst["alignment_expansion"] = max(
            worst["alignment_expansion"], abs(lhs - rhs) / max(rhs, 1e-30)
        )
        gap = mean_snr_exact(f, psi, system, los) - lower_bound_mean_snr(f, system, los)
        cross = system.gamma * weights.w3 * e0f * gf
        worst["bound_gap_is_cross_term"] = max(
            worst["bound_gap_is_cross_term"], abs(gap - cross) / max(cross, 1e-30)
        )
        cross_matrix = abs(np.vdot(f, np.outer(e0.conj(), los.g_bar) @ f))
        worst["cross_term_factorizes"] = max(
            worst["cross_term_factorizes"], abs(cross_matrix - e0f * gf) / max(e0f * gf, 1e-30)
        )
    for name, err in worst.items():
        yield name, err <= 1e-9, f"max rel err {err:.3e} over 200 random unit beams"

    proposed = design_proposed(system)
    norm_err = abs(np.linalg.norm(proposed.f) - 1.0)
    mod_err = float(np.abs(np.abs(proposed.psi) - 1.0).max())
    yield (
        "solution_constraints",
        norm_err <= 1e-10 and mod_err <= 1e-10,
        f"norm err {norm_err:.3e}, modulus err {mod_err:.3e}",
    )
    refined = design_max_mean_snr(system, init=proposed)
    ms_prop = mean_snr_exact(proposed.f, proposed.psi, system, los)
    ms_ref = mean_snr_exact(refined.f, refined.psi, system, los)
    lb = lower_bound_mean_snr(proposed.f, system, los)
    trace = refined.objective_trace
    monotone = bool(np.all(np.diff(trace) >= -1e-10 * np.abs(trace[:-1])))
    yield (
        "mean_snr_ordering",
        ms_ref >= ms_prop * (1 - 1e-12) and ms_prop >= lb * (1 - 1e-12) and monotone,
        f"refined {ms_ref:.6f} >= proposed {ms_prop:.6f} >= bound {lb:.6f}, trace monotone {monotone}",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rislink",
        description="RIS-aided MISO link experiments: beamformer design, outage and capacity tables.",
    )
    parser.add_argument("--config", type=str, default=None, help="TOML config file (defaults baked in)")
    parser.add_argument("--out", type=str, default=None, help="output directory (overrides config)")
    parser.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count override")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--workers", type=int, default=None, help="worker process count override")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("design", "outage", "capacity-vs-n", "capacity-vs-mu", "capacity-vs-theta", "validate"):
        sub.add_parser(name)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not (0 <= args.seed < 2**64):
                raise ConfigError("--seed must fit in an unsigned 64-bit integer")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg = dataclasses.replace(cfg, workers=args.workers)
        if args.samples is not None and args.samples < 1:
            raise ConfigError("--samples must be >= 1")
        out_dir = Path(args.out) if args.out is not None else cfg.output_dir
    except (ConfigError, InvalidParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "design":
            return cmd_design(cfg, out_dir)
        if args.command == "outage":
            samples = args.samples if args.samples is not None else cfg.outage_samples
            return cmd_outage(cfg, out_dir, samples, cfg.workers)
        if args.command.startswith("capacity-vs-"):
            sweep = args.command.removeprefix("capacity-vs-")
            samples = args.samples if args.samples is not None else cfg.sweep_samples
            return cmd_capacity_sweep(cfg, sweep, out_dir, samples, cfg.workers)
        if args.command == "validate":
            samples = args.samples if args.samples is not None else cfg.sweep_samples
            return cmd_validate(cfg, out_dir, samples)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, InvalidParameterError, InvalidStatsError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
