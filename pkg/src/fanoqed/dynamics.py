"""Time evolution of the emitter-cavity system in the one-excitation sector.

Two independent routes are provided and cross-checked against each other:

* ``evolve_triple`` integrates the three coupled equations of motion for the
  excited-state population n_e = <sigma+ sigma->, the cavity photon number
  n_c = <a+ a>, and the polarization p = <sigma+ a>.
* ``evolve_lindblad`` integrates the full master equation for the 3x3 density
  matrix on the basis {|e,0>, |g,1>, |g,0>}, which is closed under the
  dynamics because the initial state carries one excitation and every
  dissipator is excitation-non-increasing.

Both generators are linear and time independent, so the default integrator
propagates with per-gap matrix exponentials (exact to rounding, validated by
step halving); adaptive Runge-Kutta and fixed-step RK4 backends are kept for
cross-checks and bit-reproducible output.  In this sector the closure
<sigma_z a+ a> = -<a+ a> is exact, so the two routes must agree to integrator
accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .params import SystemParams, derive_couplings
from .rates import rate_coefficients

__all__ = [
    "BlochTriple",
    "Trajectory",
    "IntegrationError",
    "PositivityError",
    "TooFewExtremaError",
    "EnvelopeFitError",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "A_OP",
    "A_DAG",
    "SIGMA_Z",
    "excited_state_dm",
    "vacuum_state_dm",
    "hamiltonian_matrix",
    "triple_generator_matrix",
    "lindblad_generator",
    "liouvillian_matrix",
    "evolve_triple",
    "evolve_lindblad",
    "coarse_grained_solution",
    "adiabatic_polarization",
    "envelope_decay_rate",
]


class IntegrationError(RuntimeError):
    """Integration failed or its internal consistency check was violated."""


class PositivityError(RuntimeError):
    """Density-matrix eigenvalue dropped below the abort threshold."""


class TooFewExtremaError(ValueError):
    """Trajectory has neither enough oscillation maxima nor monotone decay."""


class EnvelopeFitError(RuntimeError):
    """Envelope data could not be fit (non-positive values, degenerate fit)."""


# Operators on the ordered basis {|e,0>, |g,1>, |g,0>}.  sigma+ and a+ are the
# in-sector projections; states with two excitations are excluded by
# construction, not by tolerance.
SIGMA_MINUS = np.zeros((3, 3)); SIGMA_MINUS[2, 0] = 1.0
SIGMA_PLUS = SIGMA_MINUS.T.copy()
A_OP = np.zeros((3, 3)); A_OP[2, 1] = 1.0
A_DAG = A_OP.T.copy()
SIGMA_Z = np.diag([1.0, -1.0, -1.0])
_SIGMA_PLUS_A = SIGMA_PLUS @ A_OP      # |e,0><g,1|
_A_DAG_SIGMA_MINUS = A_DAG @ SIGMA_MINUS


def excited_state_dm() -> np.ndarray:
    """|e,0><e,0| as a 3x3 complex array."""
    rho = np.zeros((3, 3), complex)
    rho[0, 0] = 1.0
    return rho


def vacuum_state_dm() -> np.ndarray:
    """|g,0><g,0| as a 3x3 complex array."""
    rho = np.zeros((3, 3), complex)
    rho[2, 2] = 1.0
    return rho


@dataclass(frozen=True)
class BlochTriple:
    """Expectation-value triple (n_e, n_c, pol) at one instant."""

    n_e: float
    n_c: float
    pol: complex = 0.0

    def __post_init__(self):
        if self.n_e < -1e-9 or self.n_c < -1e-9:
            raise ValueError(f"populations must be >= 0, got ({self.n_e}, {self.n_c})")
        if abs(self.pol) ** 2 > self.n_e * self.n_c + 1e-9:
            raise ValueError(
                f"|pol|^2 = {abs(self.pol)**2} exceeds n_e*n_c = {self.n_e * self.n_c}")


@dataclass
class Trajectory:
    """Sampled time evolution of (n_e, n_c, pol) with provenance metadata."""

    t: np.ndarray
    n_e: np.ndarray
    n_c: np.ndarray
    pol: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    def sample(self, i: int) -> tuple[float, BlochTriple]:
        return float(self.t[i]), BlochTriple(
            n_e=max(float(self.n_e[i]), 0.0),
            n_c=max(float(self.n_c[i]), 0.0),
            pol=complex(self.pol[i]))


def hamiltonian_matrix(p: SystemParams) -> np.ndarray:
    """System Hamiltonian on the one-excitation basis (3x3 complex)."""
    h = np.diag([0.5 * p.omega21,
                 p.omega_c - 0.5 * p.omega21,
                 -0.5 * p.omega21]).astype(complex)
    h[0, 1] = p.g
    h[1, 0] = np.conj(p.g)
    return h


def triple_generator_matrix(p: SystemParams) -> np.ndarray:
    """Real 4x4 generator of (n_c, n_e, Re p, Im p).

    Encodes
        dn_c/dt = 2 Re(i g+ p) - kappa n_c
        dn_e/dt = 2 Re(-i g- p) - gamma n_e
        dp/dt   = -i g+* n_e + i g-* n_c - (i detuning + Gamma_tot) p.
    """
    dc = derive_couplings(p)
    cp = 1j * dc.g_plus
    cm = -1j * dc.g_minus
    a_ne = -1j * np.conj(dc.g_plus)
    a_nc = 1j * np.conj(dc.g_minus)
    w = dc.detuning
    return np.array([
        [-p.kappa, 0.0, 2.0 * cp.real, -2.0 * cp.imag],
        [0.0, -p.gamma, 2.0 * cm.real, -2.0 * cm.imag],
        [a_nc.real, a_ne.real, -dc.gamma_tot, +w],
        [a_nc.imag, a_ne.imag, -w, -dc.gamma_tot]])


def lindblad_generator(p: SystemParams):
    """Action rho -> drho/dt of the master equation, in the Schroedinger picture.

    The cross dissipator couples the sigma- and a decay channels with the
    complex rate gamma_f; its interaction-picture phases are absorbed by the
    frame change, so the returned action is time independent.  For eta = 1 it
    is equivalent to a single collective jump operator
    sqrt(gamma)*sigma- + exp(i(theta21 - theta_c))*sqrt(kappa)*a.
    """
    dc = derive_couplings(p)
    h = hamiltonian_matrix(p)
    gamma, kappa, gph = p.gamma, p.kappa, p.gamma_ph
    gf = dc.gamma_f
    gfc = np.conj(gf)

    def action(rho: np.ndarray) -> np.ndarray:
        d = -1j * (h @ rho - rho @ h)
        d += 0.5 * gamma * (2.0 * SIGMA_MINUS @ rho @ SIGMA_PLUS
                            - SIGMA_PLUS @ SIGMA_MINUS @ rho
                            - rho @ SIGMA_PLUS @ SIGMA_MINUS)
        d += 0.5 * kappa * (2.0 * A_OP @ rho @ A_DAG
                            - A_DAG @ A_OP @ rho - rho @ A_DAG @ A_OP)
        d += 0.5 * gf * (2.0 * A_OP @ rho @ SIGMA_PLUS
                         - _SIGMA_PLUS_A @ rho - rho @ _SIGMA_PLUS_A)
        d += 0.5 * gfc * (2.0 * SIGMA_MINUS @ rho @ A_DAG
                          - _A_DAG_SIGMA_MINUS @ rho - rho @ _A_DAG_SIGMA_MINUS)
        if gph != 0.0:
            d += 0.5 * gph * (SIGMA_Z @ rho @ SIGMA_Z - rho)
        return d

    return action


def liouvillian_matrix(p: SystemParams) -> np.ndarray:
    """9x9 complex matrix form of the master-equation generator."""
    action = lindblad_generator(p)
    basis = np.eye(9, dtype=complex)
    return np.column_stack(
        [action(basis[:, k].reshape(3, 3)).ravel() for k in range(9)])


def _check_t_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("t_grid must be a 1-d array with at least two samples")
    if t[0] != 0.0:
        raise ValueError("t_grid must start at 0 (the initial-condition time)")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    return t


def _propagate_expm(a: np.ndarray, y0: np.ndarray, t: np.ndarray,
                    rtol: float, atol: float) -> np.ndarray:
    """Exact linear propagation y(t_k) by cached per-gap matrix exponentials.

    Each distinct gap costs one Pade matrix exponential; propagation is then a
    sequence of mat-vec hops.  The largest gap is validated by comparing one
    full hop against two half hops, which bounds the local error of the
    exponential itself.
    """
    gaps = np.diff(t)
    cache: dict[float, np.ndarray] = {}
    for dt in gaps:
        if dt not in cache:
            cache[dt] = expm(a * dt)
    ys = np.empty((len(t), len(y0)), dtype=np.result_type(a, y0))
    y = np.asarray(y0)
    ys[0] = y
    for k, dt in enumerate(gaps):
        y = cache[dt] @ y
        ys[k + 1] = y
    dt_max = float(gaps.max())
    half = expm(a * (dt_max / 2.0))
    defect = np.abs(half @ half - cache[dt_max]).max()
    scale = max(np.abs(ys).max(), 1.0)
    if defect > 1e3 * (rtol * scale + atol):
        raise IntegrationError(
            f"matrix-exponential propagation failed validation: "
            f"step-halving defect {defect:.3e} at gap {dt_max:.3e}")
    return ys.T


def _propagate_rk4(a: np.ndarray, y0: np.ndarray, t: np.ndarray, dt: float) -> np.ndarray:
    """Classical fixed-step RK4 hitting every sample time exactly."""
    ys = np.empty((len(t), len(y0)), dtype=np.result_type(a, y0))
    y = np.asarray(y0, dtype=ys.dtype)
    ys[0] = y
    for k in range(len(t) - 1):
        gap = t[k + 1] - t[k]
        n_sub = max(1, int(math.ceil(gap / dt)))
        h = gap / n_sub
        for _ in range(n_sub):
            k1 = a @ y
            k2 = a @ (y + 0.5 * h * k1)
            k3 = a @ (y + 0.5 * h * k2)
            k4 = a @ (y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[k + 1] = y
    return ys.T


def _propagate(a, y0, t, method, rtol, atol, dt):
    if method == "expm":
        return _propagate_expm(a, y0, t, rtol, atol), "expm"
    if method == "fixed":
        return _propagate_rk4(a, y0, t, dt), "rk4-fixed"
    scipy_method = {"rk": "DOP853", "dop853": "DOP853", "rk45": "RK45",
                    "radau": "Radau"}.get(method)
    if scipy_method is None:
        raise ValueError(f"unknown integration method {method!r}")
    kwargs = {"jac": a} if scipy_method == "Radau" else {}
    sol = solve_ivp(lambda _t, y: a @ y, (t[0], t[-1]), y0, t_eval=t,
                    rtol=rtol, atol=atol, method=scipy_method, **kwargs)
    if not sol.success:
        raise IntegrationError(
            f"{scipy_method} failed at t = {sol.t[-1] if len(sol.t) else t[0]}: "
            f"{sol.message}")
    return sol.y, scipy_method


def evolve_triple(p: SystemParams, init: BlochTriple | None = None,
                  t_grid=None, method: str = "expm",
                  rtol: float = 1e-10, atol: float = 1e-12,
                  dt: float = 1e-4) -> Trajectory:
    """Integrate the (n_e, n_c, p) equations of motion on a sample grid.

    method: "expm" (exact linear propagation, default), "rk"/"dop853"/"rk45"/
    "radau" (adaptive solve_ivp at the given tolerances), or "fixed"
    (deterministic RK4 with sub-step <= dt, for reproducible output files).
    """
    if init is None:
        init = BlochTriple(n_e=1.0, n_c=0.0, pol=0.0)
    t = _check_t_grid(t_grid)
    a = triple_generator_matrix(p)
    y0 = np.array([init.n_c, init.n_e, init.pol.real, init.pol.imag])
    ys, integ = _propagate(a, y0, t, method, rtol, atol, dt)
    return Trajectory(
        t=t, n_e=ys[1], n_c=ys[0], pol=ys[2] + 1j * ys[3],
        metadata={"integrator": integ, "rtol": rtol, "atol": atol,
                  "dt": dt if method == "fixed" else None,
                  "equations": "bloch-triple", "params": p})


def evolve_lindblad(p: SystemParams, rho0: np.ndarray | None = None,
                    t_grid=None, method: str = "expm",
                    rtol: float = 1e-10, atol: float = 1e-12,
                    dt: float = 1e-4, positivity_abort: float = 1e-7,
                    return_states: bool = False):
    """Integrate the full master equation; emit (n_e, n_c, pol) per sample.

    The density matrix is checked at every sample: Hermiticity and unit trace
    to rounding, and eigenvalues above -positivity_abort (violations raise
    PositivityError with the offending time).  With return_states=True the
    sampled 3x3 matrices are returned alongside the trajectory.
    """
    if rho0 is None:
        rho0 = excited_state_dm()
    rho0 = np.asarray(rho0, complex)
    if rho0.shape != (3, 3):
        raise ValueError(f"rho0 must be 3x3, got {rho0.shape}")
    if np.abs(rho0 - rho0.conj().T).max() > 1e-12:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-10:
        raise ValueError(f"rho0 must have unit trace, got {np.trace(rho0)}")
    t = _check_t_grid(t_grid)
    liou = liouvillian_matrix(p)
    # real 18-dim embedding keeps every backend (incl. Radau) applicable
    lr = np.zeros((18, 18))
    lr[:9, :9] = liou.real; lr[:9, 9:] = -liou.imag
    lr[9:, :9] = liou.imag; lr[9:, 9:] = liou.real
    y0 = np.concatenate([rho0.real.ravel(), rho0.imag.ravel()])
    ys, integ = _propagate(lr, y0, t, method, rtol, atol, dt)
    rhos = (ys[:9] + 1j * ys[9:]).T.reshape(len(t), 3, 3)

    herm = np.abs(rhos - np.conj(np.swapaxes(rhos, 1, 2))).max()
    tr_err = np.abs(np.trace(rhos, axis1=1, axis2=2) - 1.0).max()
    eigs = np.linalg.eigvalsh(0.5 * (rhos + np.conj(np.swapaxes(rhos, 1, 2))))
    min_eig = float(eigs.min())
    if min_eig < -positivity_abort:
        k = int(np.argmin(eigs.min(axis=1)))
        raise PositivityError(
            f"density matrix eigenvalue {eigs.min():.3e} < -{positivity_abort:.1e} "
            f"at t = {t[k]:.6e}")

    traj = Trajectory(
        t=t, n_e=rhos[:, 0, 0].real, n_c=rhos[:, 1, 1].real, pol=rhos[:, 1, 0],
        metadata={"integrator": integ, "rtol": rtol, "atol": atol,
                  "dt": dt if method == "fixed" else None,
                  "equations": "lindblad", "params": p,
                  "min_eigenvalue": min_eig, "hermiticity_defect": float(herm),
                  "trace_defect": float(tr_err)})
    if return_states:
        return traj, rhos
    return traj


def coarse_grained_solution(p: SystemParams, t):
    """Closed-form coarse-grained populations (n_e, n_c) at time(s) t.

    Valid for the fixed initial conditions n_e(0) = 1, n_c(0) = 0.  When the
    two eigenvalues are (nearly) degenerate the confluent limit is used:
    n_e = (1 + (L + R_pm + kappa) t) exp(L t), n_c = R_pp t exp(L t).
    """
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    cs = rate_coefficients(derive_couplings(p), p)
    lp, lm = cs.lambda_plus, cs.lambda_minus
    scale = max(abs(lp), abs(lm), p.gamma + p.kappa)
    if abs(lp - lm) < 1e-9 * scale:
        lam = 0.5 * (lp + lm)
        e = np.exp(lam * t)
        n_e = (1.0 + (lam + cs.r_pm + p.kappa) * t) * e
        n_c = cs.r_pp * t * e
    else:
        ep, em = np.exp(lp * t), np.exp(lm * t)
        n_e = ((lp + cs.r_pm + p.kappa) * ep - (lm + cs.r_pm + p.kappa) * em) / (lp - lm)
        n_c = cs.r_pp * (ep - em) / (lp - lm)
    return n_e, n_c


def adiabatic_polarization(p: SystemParams, n_e, n_c):
    """Quasi-steady polarization (-i g+* n_e + i g-* n_c)/(i detuning + Gamma).

    This is the value the polarization relaxes to once its fast transient has
    died out; in the strong-coupling regime it represents the running average
    over the population oscillations rather than an instantaneous value.
    """
    dc = derive_couplings(p)
    return (-1j * np.conj(dc.g_plus) * np.asarray(n_e)
            + 1j * np.conj(dc.g_minus) * np.asarray(n_c)) / (
        1j * dc.detuning + dc.gamma_tot)


def envelope_decay_rate(traj: Trajectory) -> float:
    """Decay rate of n_e from successive oscillation maxima (or direct fit).

    Oscillatory trajectories need at least 5 interior local maxima; their
    log-values are fit linearly against time.  Monotone decays are fit
    directly on log n_e.  Anything in between raises TooFewExtremaError;
    non-positive or degenerate fit data raises EnvelopeFitError.
    """
    t, x = traj.t, traj.n_e
    interior = np.nonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1
    if len(interior) >= 5:
        tm, xm = t[interior], x[interior]
        if np.any(xm <= 0.0):
            raise EnvelopeFitError("non-positive values at oscillation maxima")
        slope = np.polyfit(tm, np.log(xm), 1)[0]
    elif np.all(np.diff(x) <= 1e-12 * max(float(x.max()), 1.0)):
        good = x > 0.0
        if good.sum() < 2:
            raise EnvelopeFitError("too few positive samples for a decay fit")
        slope = np.polyfit(t[good], np.log(x[good]), 1)[0]
    else:
        raise TooFewExtremaError(
            f"only {len(interior)} local maxima and the decay is not monotone; "
            "need >= 5 maxima or a monotone trajectory")
    rate = -float(slope)
    if rate <= 0.0:
        raise EnvelopeFitError(f"fitted envelope rate {rate} is not positive")
    return rate
