"""Projected resolvents of finite tridiagonal chains.

For a chain with site energies ``E_r`` and hoppings ``J_{r+1}`` the projected
Green function on site ``r`` is::

    G_r(z) = 1 / (z - E_r - S_r(z)),     S_r = S_{r,-} + S_{r,+}

where each branch self-energy is a finite continued fraction built from the
corresponding chain end inwards, with empty branches at the two ends.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._validation import as_complex_array, check_int, check_real
from .exceptions import PoleProximityError, ValidationError

TINY = 1e-300
OVERLAP_THRESHOLD = 1e-12
MERGE_RTOL = 1e-9


@dataclass(frozen=True)
class ChainResolvent:
    """A site of a real symmetric tridiagonal chain."""

    energies: np.ndarray
    jumps: np.ndarray
    site: int = 0

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).reshape(-1)
        j = np.asarray(self.jumps, dtype=float).reshape(-1)
        if e.size < 1:
            raise ValidationError("chain needs at least one site")
        if j.size != e.size - 1:
            raise ValidationError(f"{e.size} sites need {e.size - 1} jumps, got {j.size}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(j))):
            raise ValidationError("chain data must be finite")
        site = check_int(self.site, "site")
        if not 0 <= site < e.size:
            raise ValidationError(f"site {site} outside chain of dimension {e.size}")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "jumps", j)
        object.__setattr__(self, "site", site)

    @classmethod
    def from_sector(cls, sector, site=0):
        return cls(sector.diagonal_energies, sector.jumps, site)

    @property
    def dim(self):
        return self.energies.size


def _checked(den, depth):
    if np.any(np.abs(den) < TINY):
        raise PoleProximityError(
            f"continued-fraction denominator vanished at depth {depth}", depth=depth
        )
    return den


def self_energy_branches(chain: ChainResolvent, z):
    """Left and right branch self-energies ``(S_-, S_+)`` at site ``chain.site``."""
    z = as_complex_array(z)
    e, j, r = chain.energies, chain.jumps, chain.site
    right = np.zeros_like(z)
    # S_{k,+} = J_{k+1}^2 / (z - E_{k+1} - S_{k+1,+}),  S_{last,+} = 0
    for k in range(chain.dim - 2, r - 1, -1):
        den = _checked(z - e[k + 1] - right, depth=k + 1 - r)
        right = j[k] ** 2 / den
    left = np.zeros_like(z)
    # S_{k,-} = J_k^2 / (z - E_{k-1} - S_{k-1,-}),  S_{0,-} = 0
    for k in range(1, r + 1):
        den = _checked(z - e[k - 1] - left, depth=r - k + 1)
        left = j[k - 1] ** 2 / den
    return left, right


def continued_fraction_self_energy(chain: ChainResolvent, z):
    """Exact projected self-energy of site ``chain.site`` at frequency ``z``."""
    left, right = self_energy_branches(chain, z)
    out = left + right
    return out if out.ndim else complex(out)


def projected_green(chain: ChainResolvent, z):
    """``<r|(z - H)^-1|r>`` via the continued fraction.

    Raises PoleProximityError when ``z`` sits on a dressed pole.
    """
    z = as_complex_array(z)
    sigma = continued_fraction_self_energy(chain, z)
    den = z - chain.energies[chain.site] - sigma
    if np.any(np.abs(den) < TINY) or not np.all(np.isfinite(den)):
        raise PoleProximityError("projected Green function is infinite at a dressed pole")
    out = 1.0 / den
    return out if np.ndim(out) else complex(out)


def dressed_poles_local(omega_alpha, omega_beta, m2):
    """Roots ``(z_plus, z_minus)`` of ``(z - wa)(z - wb) - m2 = 0``."""
    wa = check_real(omega_alpha, "omega_alpha")
    wb = check_real(omega_beta, "omega_beta")
    m2 = check_real(m2, "m2", nonnegative=True)
    if m2 == 0:
        # uncoupled: return the bare lines without rounding through the mean
        return complex(max(wa, wb)), complex(min(wa, wb))
    mean = 0.5 * (wa + wb)
    half = 0.5 * np.hypot(wa - wb, 2.0 * np.sqrt(m2))
    return complex(mean + half), complex(mean - half)


def chain_eigenvalues(sector):
    """Ascending eigenvalues of the sector's tridiagonal Hamiltonian."""
    e = np.asarray(sector.diagonal_energies, dtype=float)
    if e.size == 1:
        return e.copy()
    return eigh_tridiagonal(e, np.asarray(sector.jumps, dtype=float), eigvals_only=True)


def _eig_with_weights(chain):
    if chain.dim == 1:
        return chain.energies.copy(), np.ones(1)
    vals, vecs = eigh_tridiagonal(chain.energies, chain.jumps)
    return vals, vecs[chain.site] ** 2


def dressed_poles_chain(chain: ChainResolvent):
    """Poles of the projected resolvent, ascending, with multiplicity.

    Eigenvalues of the chain whose eigenvector overlaps the projected site
    with weight above ``OVERLAP_THRESHOLD`` (the rest cancel in ``G``).
    """
    vals, weights = _eig_with_weights(chain)
    return vals[weights > OVERLAP_THRESHOLD].astype(complex)


def projected_residues(chain: ChainResolvent):
    """Pole/residue pairs of the projected resolvent.

    Roots closer than ``MERGE_RTOL`` times the spectral span are merged and
    their residues added. Residues of a Hermitian chain sum to one.
    """
    vals, weights = _eig_with_weights(chain)
    keep = weights > OVERLAP_THRESHOLD
    vals, weights = vals[keep], weights[keep]
    span = float(vals[-1] - vals[0]) if vals.size > 1 else 0.0
    tol = MERGE_RTOL * max(span, 1.0)
    poles, residues = [], []
    for v, w in zip(vals, weights):
        if poles and abs(v - poles[-1]) <= tol:
            # weighted centre keeps the merged pole inside the cluster
            tot = residues[-1] + w
            poles[-1] = (poles[-1] * residues[-1] + v * w) / tot
            residues[-1] = tot
        else:
            poles.append(v)
            residues.append(w)
    return np.array(poles, dtype=complex), np.array(residues, dtype=complex)
