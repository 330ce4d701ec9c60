"""Rational (pole-residue) fitting of sampled response functions.

The fitter relocates poles with the Sanathanan-Koerner / vector-fitting
iteration: a weighting function ``sigma(w) = 1 + sum_l d_l / (w - q_l)`` is
fitted jointly with ``sigma f`` on the current poles, and the zeros of
``sigma`` become the next poles. Residues are then a linear least-squares
solve on the relocated poles. No constant or proportional term is fitted;
self-energies vanish at large ``|z|``.
"""
from __future__ import annotations

import logging

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_int, check_real
from ..exceptions import IllPosedFitError, NumericalError, ValidationError
from .poles import PoleResidueSet

logger = logging.getLogger(__name__)

#: fraction of the window width used as imaginary offset by fit_error_bound
ETA_FRACTION = 1e-3


def _cauchy(omega, poles):
    return 1.0 / (omega[:, None] - poles[None, :])


def _lstsq(A, b, what):
    x, _, rank, sv = np.linalg.lstsq(A, b, rcond=None)
    if rank < A.shape[1]:
        raise IllPosedFitError(
            f"rank-deficient {what} solve (rank {rank} < {A.shape[1]} unknowns)"
        )
    return x


def _check_window(window):
    lo, hi = (check_real(w, "window") for w in window)
    if not hi > lo:
        raise ValidationError(f"empty frequency window {window!r}")
    return lo, hi


class RationalFitter(BaseEstimator):
    """Least-squares pole-residue model of a sampled complex response.

    Parameters
    ----------
    n_poles : int
        Number of poles in the model.
    window : (float, float), optional
        Frequency window; samples outside it are ignored. Defaults to the
        sample range.
    max_iter : int
        Cap on pole-relocation sweeps.
    tol : float
        Stop once the relative change of the RMS residual falls below this.
    causal : bool
        Reflect poles that wander into the upper half-plane
        (``Im z > 0``) back below the real axis.
    initial_poles : array_like of complex, optional
        Starting poles; by default spread evenly across the window with a
        linewidth of half their spacing.

    Attributes
    ----------
    poles_, residues_ : ndarray of complex
    residual_ : float
        Weighted RMS residual over the in-window samples.
    n_iter_ : int
    reflected_ : bool
        True if any pole was reflected during the iteration.
    converged_ : bool
    """

    def __init__(self, n_poles=2, window=None, max_iter=100, tol=1e-10, causal=True,
                 initial_poles=None):
        self.n_poles = n_poles
        self.window = window
        self.max_iter = max_iter
        self.tol = tol
        self.causal = causal
        self.initial_poles = initial_poles

    def _prepare(self, omega, values, sample_weight):
        omega = np.asarray(omega, dtype=float).reshape(-1)
        values = np.asarray(values, dtype=complex).reshape(-1)
        if omega.shape != values.shape:
            raise ValidationError("omega and values differ in length")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(values))):
            raise ValidationError("samples must be finite")
        w = (np.ones_like(omega) if sample_weight is None
             else np.asarray(sample_weight, dtype=float).reshape(-1))
        if w.shape != omega.shape or np.any(w < 0):
            raise ValidationError("sample_weight must be non-negative, one per sample")
        lo, hi = (omega.min(), omega.max()) if self.window is None else _check_window(self.window)
        inside = (omega >= lo) & (omega <= hi)
        return omega[inside], values[inside], w[inside], (lo, hi)

    def _initial(self, lo, hi, n):
        if self.initial_poles is not None:
            q = np.asarray(self.initial_poles, dtype=complex).reshape(-1)
            if q.size != n:
                raise ValidationError(f"initial_poles has {q.size} entries, n_poles={n}")
            return q
        width = hi - lo
        xi = lo + width * (np.arange(n) + 0.5) / n
        return xi - 0.5j * width / n

    def _reflect(self, q):
        if self.causal and np.any(q.imag > 0):
            self.reflected_ = True
            logger.info("reflecting %d anti-causal poles", int(np.sum(q.imag > 0)))
            q = q.real - 1j * np.abs(q.imag)
            # a reflected pole may land on its mirror partner; split them
            scale = max(1.0, float(np.max(np.abs(q))))
            for i in range(q.size):
                for j in range(i):
                    if abs(q[i] - q[j]) < 1e-8 * scale:
                        q[i] += 1e-6 * scale
        return q

    def fit(self, omega, values, sample_weight=None):
        n = check_int(self.n_poles, "n_poles")
        if n < 1:
            raise ValidationError("n_poles must be >= 1")
        omega, f, w, (lo, hi) = self._prepare(omega, values, sample_weight)
        if omega.size < 4 * n:
            raise IllPosedFitError(
                f"{omega.size} samples in window cannot support {n} poles (need {4 * n})"
            )
        sw = np.sqrt(w)
        scale = max(float(np.max(np.abs(f))), 1e-300)
        fs = f / scale
        self.reflected_ = False
        q = self._reflect(self._initial(lo, hi, n))
        res_prev = np.inf
        self.converged_ = False
        for it in range(1, int(self.max_iter) + 1):
            C = _cauchy(omega, q)
            A = np.hstack([C, -fs[:, None] * C]) * sw[:, None]
            x = _lstsq(A, fs * sw, "pole relocation")
            d = x[n:]
            q = np.linalg.eigvals(np.diag(q) - np.outer(np.ones(n), d))
            q = self._reflect(q)
            r = _lstsq(_cauchy(omega, q) * sw[:, None], fs * sw, "residue")
            err = _cauchy(omega, q) @ r - fs
            res = float(np.sqrt(np.sum(w * np.abs(err) ** 2) / np.sum(w)))
            logger.debug("iteration %d rms %.3e", it, res)
            change = abs(res_prev - res) / max(res, 1e-300)
            res_prev = res
            if change < self.tol or res < 1e-15:
                self.converged_ = True
                break
        order = np.lexsort((q.imag, q.real))
        self.poles_ = q[order]
        self.residues_ = r[order] * scale
        self.residual_ = res * scale
        self.n_iter_ = it
        return self

    def predict(self, z):
        check_is_fitted(self, "poles_")
        z = np.asarray(z, dtype=complex)
        return (1.0 / np.subtract.outer(z, self.poles_)) @ self.residues_

    @property
    def pole_residue_set_(self):
        check_is_fitted(self, "poles_")
        return PoleResidueSet(self.poles_, self.residues_)


def fit_rational(samples, n_poles, window=None, **kwargs):
    """Fit ``sum_l r_l / (w - z_l)`` to ``(omega, value)`` samples.

    Returns ``(PoleResidueSet, residual)`` where ``residual`` is the RMS
    misfit over the in-window samples. Extra keyword arguments go to
    :class:`RationalFitter`.
    """
    pairs = list(samples)
    if not pairs:
        raise IllPosedFitError("no samples")
    omega = np.array([p[0] for p in pairs], dtype=float)
    values = np.array([p[1] for p in pairs], dtype=complex)
    est = RationalFitter(n_poles=n_poles, window=window, **kwargs).fit(omega, values)
    return est.pole_residue_set_, est.residual_


def fit_error_eta(window):
    lo, hi = _check_window(window)
    return ETA_FRACTION * (hi - lo)


def fit_error_bound(g_fit, delta_sigma, window, grid_points=400, eta=None):
    """``max |G_fit(w + i eta) * dS(w + i eta)|`` over a uniform grid.

    The controlled-approximation criterion asks for a result well below one.
    ``eta`` defaults to ``ETA_FRACTION`` times the window width so the grid
    never lands on a real-axis pole.
    """
    lo, hi = _check_window(window)
    grid_points = check_int(grid_points, "grid_points")
    if grid_points < 2:
        raise ValidationError("grid_points must be >= 2")
    eta = fit_error_eta(window) if eta is None else check_real(eta, "eta", positive=True)
    omega = np.linspace(lo, hi, grid_points)
    z = omega + 1j * eta
    with np.errstate(all="ignore"):
        prod = np.asarray(g_fit(z), dtype=complex) * np.asarray(delta_sigma(z), dtype=complex)
    bad = ~np.isfinite(prod)
    if np.any(bad):
        raise NumericalError(f"non-finite sample at omega={omega[np.argmax(bad)]!r}")
    return float(np.max(np.abs(prod)))
