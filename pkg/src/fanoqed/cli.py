"""Command-line interface: config ingestion, sweeps, and the validation suite.

Subcommands
    rate-sweep    transition-rate profile over a reduced-detuning grid -> CSV
    dynamics      population time evolution (full ODE vs coarse-grained) -> CSV
    spectrum      spectrum components on a frequency grid -> CSV
    spectrum-map  total spectrum over a (detuning, frequency) grid -> CSV
    validate      seeded randomized invariant suite -> report on stdout

All physics parameters come from a single JSON config file (flags only select
output path, worker count, seed, and the fixed-step integrator); energies are
in ueV, angles in radians, times in 1/ueV.  CSV output is deterministic:
17-significant-digit values, comma delimiter, LF line endings, and a comment
header carrying the full parameter snapshot.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .params import (SystemParams, derive_couplings, collective_decay_min_eigenvalue,
                     HBAR_UEV_PS)
from .rates import (rate_coefficients, transition_rate, transition_rate_weak,
                    purcell_rate, fano_formula, rate_sweep)
from .dynamics import (evolve_triple, evolve_lindblad, coarse_grained_solution,
                       IntegrationError, PositivityError)
from .spectra import (spectral_poles, regression_matrix, integrated_moments,
                      total_spectrum, default_frequency_grid,
                      DivergentMomentsError, QuadratureConvergenceError)

__all__ = ["RunConfig", "load_config", "main",
           "cmd_rate_sweep", "cmd_dynamics", "cmd_spectrum",
           "cmd_spectrum_map", "cmd_validate"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SystemParams))
_SECTION_KEYS = {
    "sweep": ("variable", "start", "stop", "count"),
    "dynamics": ("t_max", "count"),
    "spectrum": ("ds", "nu_start", "nu_stop", "count"),
    "map": ("detuning_start", "detuning_stop", "count"),
    "validate": ("draws", "inject_eta"),
}
_TOP_KEYS = ("command", "out", "seed", "workers", "fixed_step",
             "fixed_step_dt", "params") + tuple(_SECTION_KEYS)


class ConfigError(ValueError):
    """Malformed run configuration (unknown key, bad type, bad value)."""


@dataclass
class RunConfig:
    """Fully resolved run configuration (defaults filled in)."""

    params: SystemParams = field(default_factory=SystemParams)
    command: str | None = None
    out: str | None = None
    seed: int = 12345
    workers: int = 1
    fixed_step: bool = False
    fixed_step_dt: float = 1e-4
    sweep: dict = field(default_factory=lambda: {
        "variable": "eps", "start": -300.0, "stop": 300.0, "count": 801})
    dynamics: dict = field(default_factory=lambda: {"t_max": 0.5, "count": 2001})
    spectrum: dict = field(default_factory=lambda: {
        "ds": 20.0, "nu_start": None, "nu_stop": None, "count": 2001})
    map: dict = field(default_factory=lambda: {
        "detuning_start": -4000.0, "detuning_stop": 4000.0, "count": 161})
    validate: dict = field(default_factory=lambda: {"draws": 200, "inject_eta": None})

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "out": self.out,
            "seed": self.seed,
            "workers": self.workers,
            "fixed_step": self.fixed_step,
            "fixed_step_dt": self.fixed_step_dt,
            "params": dataclasses.asdict(self.params),
            "sweep": dict(self.sweep),
            "dynamics": dict(self.dynamics),
            "spectrum": dict(self.spectrum),
            "map": dict(self.map),
            "validate": dict(self.validate),
        }


def _from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    cfg = RunConfig()
    if "params" in doc:
        pdoc = doc["params"]
        if not isinstance(pdoc, dict):
            raise ConfigError("'params' must be an object")
        for key in pdoc:
            if key not in _PARAM_KEYS:
                raise ConfigError(f"unknown params key {key!r}")
        try:
            cfg.params = SystemParams(**pdoc)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad params: {exc}") from exc
    for section, keys in _SECTION_KEYS.items():
        if section in doc:
            sdoc = doc[section]
            if not isinstance(sdoc, dict):
                raise ConfigError(f"'{section}' must be an object")
            for key in sdoc:
                if key not in keys:
                    raise ConfigError(f"unknown {section} key {key!r}")
            getattr(cfg, section).update(sdoc)
    for key in ("command", "out"):
        if key in doc and doc[key] is not None and not isinstance(doc[key], str):
            raise ConfigError(f"'{key}' must be a string")
    cfg.command = doc.get("command", cfg.command)
    cfg.out = doc.get("out", cfg.out)
    for key, typ in (("seed", int), ("workers", int),
                     ("fixed_step", bool), ("fixed_step_dt", float)):
        if key in doc:
            val = doc[key]
            if typ is float and isinstance(val, int) and not isinstance(val, bool):
                val = float(val)
            if not isinstance(val, typ) or (typ is int and isinstance(val, bool)):
                raise ConfigError(f"'{key}' must be {typ.__name__}")
            setattr(cfg, key, val)
    if cfg.sweep["variable"] != "eps":
        raise ConfigError(f"unsupported sweep variable {cfg.sweep['variable']!r}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    return cfg


def load_config(path: str | None) -> RunConfig:
    """Load and validate a JSON config; None yields the defaults."""
    if path is None:
        return RunConfig()
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return _from_dict(doc)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: str | None, comments: list[str], header: list[str],
               rows, footer: list[str] = ()):
    """Deterministic CSV: '#' comment lines, one header row, LF endings."""
    out = sys.stdout if path is None else open(path, "w", encoding="utf-8", newline="")
    try:
        for line in comments:
            out.write(f"# {line}\n")
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                               for v in row) + "\n")
        for line in footer:
            out.write(f"# {line}\n")
    finally:
        if path is not None:
            out.close()


def _snapshot(cfg: RunConfig) -> list[str]:
    p = dataclasses.asdict(cfg.params)
    lines = ["params: " + " ".join(f"{k}={_fmt(v)}" for k, v in p.items()),
             f"units: energies ueV, time 1/ueV (1 time unit = {_fmt(HBAR_UEV_PS)} ps)",
             f"seed: {cfg.seed}",
             f"integrator: {'rk4-fixed dt=' + _fmt(cfg.fixed_step_dt) if cfg.fixed_step else 'expm'}"]
    return lines


def cmd_rate_sweep(cfg: RunConfig) -> int:
    """Transition-rate profile W(eps) with weak-coupling and reference columns."""
    sw = cfg.sweep
    if int(sw["count"]) == 1:
        # degenerate request: one grid point, evaluated by the same operations
        p1 = cfg.params.with_reduced_detuning(float(sw["start"]))
        dc = derive_couplings(p1)
        eps = np.array([float(sw["start"])])
        w_full = np.array([transition_rate(p1)])
        w_weak = np.array([transition_rate_weak(p1)])
        w_fano = np.array([fano_formula(dc.q, dc.eps, p1.gamma)])
    else:
        table = rate_sweep(cfg.params, (float(sw["start"]), float(sw["stop"])),
                           int(sw["count"]))
        eps, w_full, w_weak, w_fano = (table.eps, table.w_full,
                                       table.w_weak, table.w_fano)
    rows = [(float(e), float(e * cfg.params.kappa / 2.0), float(wf), float(ww), float(wn))
            for e, wf, ww, wn in zip(eps, w_full, w_weak, w_fano)]
    _write_csv(cfg.out, _snapshot(cfg) + ["detuning_ueV = omega21 - omega_c"],
               ["eps", "detuning_ueV", "W_full", "W_weak", "W_fano_abs"], rows)
    return EXIT_OK


def cmd_dynamics(cfg: RunConfig) -> int:
    """Population evolution: full equations of motion vs coarse-grained forms."""
    dy = cfg.dynamics
    t = np.linspace(0.0, float(dy["t_max"]), int(dy["count"]))
    p = cfg.params
    method = "fixed" if cfg.fixed_step else "expm"
    traj = evolve_triple(p, t_grid=t, method=method, dt=cfg.fixed_step_dt)
    n_e_c, n_c_c = coarse_grained_solution(p, t)
    w = transition_rate(p)
    rows = [(float(t[i]), float(traj.n_e[i]), float(traj.n_c[i]),
             float(n_e_c[i]), float(n_c_c[i]), float(math.exp(-w * t[i])))
            for i in range(len(t))]
    _write_csv(cfg.out, _snapshot(cfg) + [f"W = {_fmt(w)}"],
               ["t", "n_e_ode", "n_c_ode", "n_e_coarse", "n_c_coarse", "exp_minus_Wt"],
               rows)
    return EXIT_OK


def _spectrum_grid(cfg: RunConfig) -> np.ndarray:
    sp = cfg.spectrum
    if sp["nu_start"] is None or sp["nu_stop"] is None:
        return default_frequency_grid(cfg.params, float(sp["ds"]), int(sp["count"]))
    return np.linspace(float(sp["nu_start"]), float(sp["nu_stop"]), int(sp["count"]))


def cmd_spectrum(cfg: RunConfig) -> int:
    """Spectrum components on a frequency grid, with the sum rule as footer."""
    ds = float(cfg.spectrum["ds"])
    comp = total_spectrum(cfg.params, _spectrum_grid(cfg), ds)
    rows = [(float(comp.nu[i]), float(comp.s21[i]), float(comp.s_c[i]),
             float(comp.s_f[i]), float(comp.s_total[i]))
            for i in range(len(comp.nu))]
    _write_csv(cfg.out, _snapshot(cfg) + [f"ds = {_fmt(ds)}"],
               ["nu_minus_omega21_ueV", "S21", "Sc", "SF", "Stotal"], rows,
               footer=[f"sum_rule = {_fmt(comp.sum_rule)}"])
    return EXIT_OK


def _map_row(args) -> tuple:
    """One detuning row of the spectrum map (top level for process pools)."""
    pdict, detuning, nu, ds = args
    p = SystemParams(**pdict).with_detuning(detuning)
    cs = rate_coefficients(derive_couplings(p), p)
    if cs.lambda_plus >= -1e-9 * p.kappa:
        return detuning, None, cs.lambda_plus
    comp = total_spectrum(p, np.asarray(nu), ds)
    return detuning, comp.s_total, cs.lambda_plus


def cmd_spectrum_map(cfg: RunConfig) -> int:
    """Total spectrum over a (detuning, frequency) grid as long-format triples.

    Detunings are omega21 - omega_c; points too close to the exact
    antiresonance (|lambda_plus| < 1e-9 kappa, divergent moments) are skipped
    and reported as gap comments.
    """
    mp = cfg.map
    ds = float(cfg.spectrum["ds"])
    detunings = np.linspace(float(mp["detuning_start"]), float(mp["detuning_stop"]),
                            int(mp["count"]))
    pad = 20.0 * ds + 5.0 * cfg.params.g_abs + 10.0 * max(
        cfg.params.kappa, ds, cfg.params.g_abs)
    lo = min(0.0, -detunings.max()) - pad
    hi = max(0.0, -detunings.min()) + pad
    nu = np.linspace(lo, hi, int(cfg.spectrum["count"]))
    pdict = dataclasses.asdict(cfg.params)
    jobs = [(pdict, float(d), nu.tolist(), ds) for d in detunings]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_map_row, jobs))
    else:
        results = [_map_row(j) for j in jobs]
    rows, gaps = [], []
    for detuning, s_total, lam in results:
        if s_total is None:
            gaps.append(f"gap: detuning_ueV = {_fmt(detuning)} "
                        f"(lambda_plus = {_fmt(lam)}, moments diverge)")
            continue
        rows.extend((detuning, float(nu[i]), float(s_total[i]))
                    for i in range(len(nu)))
    _write_csv(cfg.out, _snapshot(cfg) + [f"ds = {_fmt(ds)}",
                                          "detuning_ueV = omega21 - omega_c"],
               ["detuning_ueV", "nu_minus_omega21_ueV", "Stotal"], rows,
               footer=gaps)
    return EXIT_OK


def _draw_params(rng: np.random.Generator) -> SystemParams:
    """Random valid parameter set with kappa > gamma (the supported regime)."""
    return SystemParams(
        omega21=0.0,
        g_abs=rng.uniform(0.0, 150.0),
        gamma=rng.uniform(0.01, 2.0),
        kappa=rng.uniform(5.0, 150.0),
        gamma_ph=rng.uniform(0.0, 40.0),
        eta=rng.uniform(0.0, 1.0),
    ).with_reduced_detuning(rng.uniform(-200.0, 200.0))


def _validate_checks(cfg: RunConfig):
    """Yield (name, worst, tol, detail) for every randomized invariant check."""
    rng = np.random.default_rng(cfg.seed)
    draws = int(cfg.validate["draws"])
    sets = [_draw_params(rng) for _ in range(draws)]

    worst = 0.0
    for p in sets:
        worst = min(worst, collective_decay_min_eigenvalue(
            p.gamma, p.kappa, p.eta, p.theta21, p.theta_c) / p.kappa)
    yield ("collective_decay_psd", -worst, 1e-12,
           "min eigenvalue of the channel decay matrix / kappa")

    worst = 0.0
    for p in sets:
        cs = rate_coefficients(derive_couplings(p), p)
        s_ref = -(p.gamma + p.kappa + cs.r_pm + cs.r_mp)
        p_ref = (cs.r_pm + p.kappa) * (cs.r_mp + p.gamma) - cs.r_pp * cs.r_mm
        scale = max(abs(s_ref), abs(p_ref), 1e-300)
        worst = max(worst,
                    abs(cs.lambda_plus + cs.lambda_minus - s_ref) / max(abs(s_ref), 1e-30),
                    abs(cs.lambda_plus * cs.lambda_minus - p_ref) / max(abs(p_ref), 1e-30))
    yield ("vieta_identities", worst, 1e-10, "trace/determinant of the rate matrix")

    worst = 0.0
    for p in sets:
        cs = rate_coefficients(derive_couplings(p), p)
        ev = np.sort(np.linalg.eigvals(cs.coefficient_matrix(p)).real)
        scale = max(abs(cs.lambda_plus), abs(cs.lambda_minus))
        worst = max(worst, abs(ev[1] - cs.lambda_plus) / scale,
                    abs(ev[0] - cs.lambda_minus) / scale)
    yield ("eigenvalue_oracle", worst, 1e-10, "closed-form vs numpy eigensolver")

    worst = 0.0
    for p in sets:
        poles = spectral_poles(p)
        ev = sorted(np.linalg.eigvals(regression_matrix(p)),
                    key=lambda z: (z.real, z.imag))
        got = sorted((poles.gamma_p, poles.gamma_m), key=lambda z: (z.real, z.imag))
        worst = max(worst, max(abs(a - b) / abs(b) for a, b in zip(got, ev)))
    yield ("pole_regression_duality", worst, 1e-10,
           "spectral poles vs regression-matrix eigenvalues")

    worst = 0.0
    used = 0
    for p in sets:
        cs = rate_coefficients(derive_couplings(p), p)
        if cs.lambda_plus >= -1e-6 * p.kappa:
            continue
        used += 1
        worst = max(worst, abs(integrated_moments(p).sum_rule(p) - 1.0))
    yield ("photon_sum_rule", worst, 1e-9, f"{used} decaying parameter sets")

    worst = 0.0
    for _ in range(max(draws // 10, 5)):
        gamma = rng.uniform(0.01, 0.1)
        kappa = gamma * rng.uniform(1e3, 5e3)
        g_abs = rng.uniform(0.0, 5.0) * math.sqrt(gamma * kappa)
        base = SystemParams(g_abs=g_abs, gamma=gamma, kappa=kappa, eta=1.0)
        q = derive_couplings(base).q
        eps_grid = np.linspace(-10.0, 10.0, 201)
        ww = np.array([transition_rate_weak(base.with_reduced_detuning(float(e)))
                       for e in eps_grid])
        wf = np.array([fano_formula(q, float(e), gamma) for e in eps_grid])
        # both formulas vanish near eps = -q at slightly offset detunings, so
        # pointwise ratios diverge there; check outside plus a sup-norm bound
        outside = np.abs(eps_grid + q.real) >= max(2.0, 0.5 * q.real)
        worst = max(worst, float(np.abs(ww - wf).max() / wf.max()))
        if outside.any():
            worst = max(worst, float((np.abs(ww - wf)[outside] / wf[outside]).max()))
    yield ("fano_recovery", worst, 1e-2,
           "weak-coupling rate vs reference profile, away from the zero and sup norm")

    worst = 0.0
    for p in sets:
        p0 = dataclasses.replace(p, eta=0.0)
        wk = transition_rate_weak(p0)
        worst = max(worst, abs(wk - purcell_rate(p0)) / wk)
    yield ("purcell_identity", worst, 1e-12, "eta=0 weak rate vs Purcell form")

    worst = 0.0
    for p in sets[: max(draws // 4, 5)]:
        p0 = dataclasses.replace(p, eta=0.0)
        for eps in (0.3, 1.7, 12.0, 77.0):
            wp = transition_rate(p0.with_reduced_detuning(eps))
            wm = transition_rate(p0.with_reduced_detuning(-eps))
            worst = max(worst, abs(wp - wm) / max(wp, wm))
    yield ("symmetry_eta0", worst, 1e-10, "W(eps) = W(-eps) at zero overlap")

    worst = 0.0
    for p in sets[:3]:
        w = transition_rate(p)
        t = np.linspace(0.0, min(10.0 / w, 1e4), 400)
        tr1 = evolve_triple(p, t_grid=t)
        tr2 = evolve_lindblad(p, t_grid=t)
        worst = max(worst, np.abs(tr1.n_e - tr2.n_e).max())
    yield ("dynamics_cross_oracle", worst, 1e-6,
           "equations of motion vs master equation, n_e")

    inject = cfg.validate.get("inject_eta")
    if inject is not None:
        bad = collective_decay_min_eigenvalue(1.0, 50.0, float(inject))
        yield ("collective_decay_psd_injected", -bad / 50.0, 1e-12,
               f"deliberate eta={inject}: min eigenvalue {bad:.6e}")


def cmd_validate(cfg: RunConfig) -> int:
    """Run the randomized invariant suite; nonzero exit on any failure."""
    failures = 0
    for name, worst, tol, detail in _validate_checks(cfg):
        ok = worst <= tol
        failures += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: worst={worst:.3e} "
              f"tol={tol:.1e} ({detail})")
    print(f"validate: {'all checks passed' if failures == 0 else f'{failures} check(s) failed'}")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


_COMMANDS = {
    "rate-sweep": cmd_rate_sweep,
    "dynamics": cmd_dynamics,
    "spectrum": cmd_spectrum,
    "spectrum-map": cmd_spectrum_map,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fanoqed",
        description="Interference-resolved emitter-cavity rates, dynamics and spectra")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=None, help="output CSV path (default stdout)")
    parser.add_argument("--workers", type=int, default=None, help="worker pool size")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized checks")
    parser.add_argument("--fixed-step", action="store_true", default=None,
                        help="use the deterministic fixed-step integrator")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        cfg.command = args.command
        if args.out is not None:
            cfg.out = args.out
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("workers must be >= 1")
            cfg.workers = args.workers
        if args.seed is not None:
            cfg.seed = args.seed
        if args.fixed_step:
            cfg.fixed_step = True
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return _COMMANDS[args.command](cfg)
    except (DivergentMomentsError, QuadratureConvergenceError, IntegrationError,
            PositivityError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
