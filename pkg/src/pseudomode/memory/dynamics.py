"""Time-domain propagation of a retained amplitude under a memory kernel.

Two independent routes to the same dynamics (rotating frame of the retained
line ``omega_alpha``, eliminated amplitudes starting in vacuum):

* the nonlocal equation ``dc/dt = -int_0^t K(t - s) c(s) ds`` with
  ``K(t) = sum_l r_l exp(-1j (z_l - omega_alpha) t)``, solved by trapezoidal
  product integration plus one Richardson step;
* the local pseudomode system ``dc/dt = -1j sum_l g_l b_l``,
  ``db_l/dt = -1j (z_l - omega_alpha) b_l - 1j g_l c`` with ``g_l**2 = r_l``,
  integrated with classical RK4.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_complex, check_real, check_time_grid
from ..exceptions import ConvergenceError, InstabilityError, ValidationError
from .poles import PoleResidueSet

logger = logging.getLogger(__name__)

GROWTH_LIMIT = 1e6


class FactorizationWarning(UserWarning):
    """A residue on an undamped pole is not positive real."""


@dataclass(frozen=True)
class PseudomodeSystem:
    retained_frequency: float
    frequencies: np.ndarray
    linewidths: np.ndarray
    couplings: np.ndarray
    #: indices of modes whose coupling came from a non-positive residue on
    #: an undamped pole (principal branch taken)
    flagged: tuple = ()

    @classmethod
    def from_pole_residue(cls, omega_alpha, prs: PoleResidueSet):
        """Rank-one factorisation ``g_l = sqrt(r_l)`` on the principal branch."""
        omega_alpha = check_real(omega_alpha, "omega_alpha")
        g = np.sqrt(prs.residues.astype(complex))
        flagged = tuple(
            i for i, (lam, r) in enumerate(zip(prs.linewidths, prs.residues))
            if lam == 0 and not (r.imag == 0 and r.real > 0)
        )
        if flagged:
            warnings.warn(
                f"undamped poles {flagged} carry non-positive residues; "
                "using the principal square root",
                FactorizationWarning,
                stacklevel=2,
            )
        return cls(omega_alpha, prs.frequencies.copy(), prs.linewidths.copy(), g, flagged)

    @property
    def n_modes(self):
        return self.couplings.size

    def generator(self):
        """Matrix ``A`` of ``dy/dt = A y`` for ``y = (c, b_1, ..., b_L)``."""
        L = self.n_modes
        A = np.zeros((L + 1, L + 1), complex)
        A[0, 1:] = -1j * self.couplings
        A[1:, 0] = -1j * self.couplings
        detuning = self.frequencies - 1j * self.linewidths - self.retained_frequency
        A[1:, 1:] = np.diag(-1j * detuning)
        return A

    def induced_poles(self):
        return PoleResidueSet(self.frequencies - 1j * self.linewidths, self.couplings ** 2)


@dataclass(frozen=True)
class TrajectoryPair:
    grid: np.ndarray
    volterra_amplitude: np.ndarray
    pseudomode_amplitude: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        if len(self.volterra_amplitude) != n or len(self.pseudomode_amplitude) != n:
            raise ValidationError("trajectory lengths differ")
        if n and (self.grid[0] != 0 or np.any(np.diff(self.grid) <= 0)):
            raise ValidationError("grid must start at 0 and increase strictly")

    @property
    def deviation(self):
        return np.abs(self.volterra_amplitude - self.pseudomode_amplitude)


@dataclass(frozen=True)
class EquivalenceReport:
    trajectories: TrajectoryPair
    max_deviation: float
    dt: float
    flagged: tuple = field(default=())


def _check_growth(value, c0, step):
    if not np.isfinite(value) or abs(value) > GROWTH_LIMIT * max(abs(c0), 1e-300):
        raise InstabilityError(
            f"amplitude grew beyond {GROWTH_LIMIT:g} x |c0| at step {step}; "
            "reduce dt"
        )


def _trapezoid_volterra(kernel, c0, n_steps, h):
    """Trapezoidal product integration of ``dc/dt = -(K * c)(t)`` on ``k h``."""
    K = kernel(h * np.arange(n_steps + 1))
    c = np.empty(n_steps + 1, complex)
    c[0] = c0
    implicit = 1.0 + 0.25 * h * h * K[0]
    conv_prev = 0.0
    for n in range(1, n_steps + 1):
        # trapezoid over s in [0, t_n] without the (unknown) s = t_n term
        partial = h * (0.5 * K[n] * c[0] + np.dot(K[n - 1:0:-1], c[1:n]))
        c[n] = (c[n - 1] - 0.5 * h * (conv_prev + partial)) / implicit
        conv_prev = partial + 0.5 * h * K[0] * c[n]
        _check_growth(c[n], c0, n)
    return c


def solve_volterra(omega_alpha, prs: PoleResidueSet, c0, T, dt, richardson=True):
    """Retained amplitude on ``t_k = k dt`` from the nonlocal equation.

    Returns ``(grid, amplitude)``. The convolution and the outer time
    integral both use the trapezoidal rule, with the implicit end-point term
    solved in closed form (second order). With ``richardson=True`` the run is
    repeated at ``dt / 2`` and the two are combined as ``(4 c_{h/2} - c_h) / 3``,
    cancelling the ``h**2`` error term.
    """
    omega_alpha = check_real(omega_alpha, "omega_alpha")
    c0 = check_complex(c0, "c0")
    n_steps, dt = check_time_grid(T, dt)
    grid = dt * np.arange(n_steps + 1)
    if len(prs) == 0:
        return grid, np.full(n_steps + 1, c0, dtype=complex)
    kernel = PoleResidueSet(prs.poles - omega_alpha, prs.residues).kernel
    coarse = _trapezoid_volterra(kernel, c0, n_steps, dt)
    if not richardson:
        return grid, coarse
    fine = _trapezoid_volterra(kernel, c0, 2 * n_steps, 0.5 * dt)
    return grid, (4.0 * fine[::2] - coarse) / 3.0


def _rk4_propagator(A, h):
    hA = h * A
    P = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ hA / k
        P = P + term
    return P


def solve_pseudomode(system: PseudomodeSystem, c0, T, dt):
    """Retained amplitude from the pseudomode-augmented linear system.

    Pseudomodes start in vacuum. Fixed-step classical RK4; for a constant
    linear generator one RK4 step is the degree-4 Taylor propagator.
    """
    c0 = check_complex(c0, "c0")
    n_steps, dt = check_time_grid(T, dt)
    grid = dt * np.arange(n_steps + 1)
    c = np.empty(n_steps + 1, complex)
    if system.n_modes == 0:
        c[:] = c0
        return grid, c
    P = _rk4_propagator(system.generator(), dt)
    y = np.zeros(system.n_modes + 1, complex)
    y[0] = c0
    c[0] = c0
    for n in range(1, n_steps + 1):
        y = P @ y
        c[n] = y[0]
        _check_growth(c[n], c0, n)
    return grid, c


def _rate(omega_alpha, prs):
    if len(prs) == 0:
        return 1.0
    detuning = np.abs(prs.poles - omega_alpha)
    return float(max(detuning.max(), math.sqrt(np.abs(prs.residues).sum()), 1e-12))


def converged_dt(omega_alpha, prs: PoleResidueSet, c0, T, tol=1e-6, max_halvings=14,
                 richardson=True):
    """Step size at which the Volterra solution is accurate to ``tol``.

    Starts from one tenth of the fastest kernel time scale and halves the
    step until the error estimate ``max|c_h - c_2h| / (2**p - 1)`` drops
    below ``tol / 2``; ``p`` is 4 with extrapolation and 2 without.
    """
    T = check_real(T, "T", positive=True)
    n = max(2, math.ceil(T * _rate(omega_alpha, prs) / 0.1))
    dt = T / n
    denom = 15.0 if richardson else 3.0
    _, prev = solve_volterra(omega_alpha, prs, c0, T, dt, richardson)
    estimates = []
    for _ in range(max_halvings):
        dt *= 0.5
        _, cur = solve_volterra(omega_alpha, prs, c0, T, dt, richardson)
        err = float(np.max(np.abs(cur[::2] - prev))) / denom
        estimates.append(err)
        logger.debug("dt=%.3e richardson error %.3e", dt, err)
        if err < 0.5 * tol:
            return dt
        prev = cur
    raise ConvergenceError(
        f"no step size reached tol={tol:g} after {max_halvings} halvings", estimates
    )


def equivalence_report(omega_alpha, prs: PoleResidueSet, c0, T, dt=None, tol=1e-6):
    """Run both propagation routes on the same grid and compare them.

    With ``dt=None`` the step comes from :func:`converged_dt`.
    """
    system = PseudomodeSystem.from_pole_residue(omega_alpha, prs)
    if dt is None:
        dt = converged_dt(omega_alpha, prs, c0, T, tol)
    grid, cv = solve_volterra(omega_alpha, prs, c0, T, dt)
    _, cp = solve_pseudomode(system, c0, T, dt)
    pair = TrajectoryPair(grid, cv, cp)
    dev = float(np.max(pair.deviation)) if grid.size else 0.0
    return EquivalenceReport(pair, dev, float(dt), system.flagged)
