"""Finite pole-residue representations of self-energies and kernels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import as_complex_array
from ..exceptions import PoleProximityError, ValidationError

#: relative tolerance under which two poles count as the same pole
POLE_MERGE_RTOL = 1e-9
#: |z - z_l| below this is treated as sitting on a pole
POLE_GUARD = 1e-14


@dataclass(frozen=True)
class PoleResidueSet:
    """``S(z) = sum_l r_l / (z - z_l)`` with ``Im z_l <= 0``.

    The time-domain partner is ``K(t) = sum_l r_l exp(-1j z_l t)``.
    """

    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        p = as_complex_array(self.poles, "poles").reshape(-1)
        r = as_complex_array(self.residues, "residues").reshape(-1)
        if p.shape != r.shape:
            raise ValidationError(f"{p.size} poles but {r.size} residues")
        if np.any(p.imag > 0):
            raise ValidationError("poles must lie in the causal half-plane (Im z <= 0)")
        scale = max(1.0, float(np.max(np.abs(p)))) if p.size else 1.0
        for i in range(p.size):
            if np.any(np.abs(p[i + 1:] - p[i]) <= POLE_MERGE_RTOL * scale):
                raise ValidationError(f"pole {p[i]} is repeated")
        p.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "poles", p)
        object.__setattr__(self, "residues", r)

    @classmethod
    def from_terms(cls, terms):
        terms = list(terms)
        if not terms:
            return cls.empty()
        poles, residues = zip(*terms)
        return cls(poles, residues)

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, complex), np.zeros(0, complex))

    def __len__(self):
        return self.poles.size

    def __iter__(self):
        return iter(zip(self.poles, self.residues))

    @property
    def frequencies(self):
        return self.poles.real

    @property
    def linewidths(self):
        return -self.poles.imag

    def kernel(self, t):
        return kernel_eval(self, t)

    def __call__(self, z):
        return self_energy_eval(self, z)

    def sorted(self):
        order = np.lexsort((self.poles.imag, self.poles.real))
        return PoleResidueSet(self.poles[order], self.residues[order])

    def to_record(self):
        return {
            "poles": [[p.real, p.imag] for p in self.poles],
            "residues": [[r.real, r.imag] for r in self.residues],
        }

    @classmethod
    def from_record(cls, rec):
        poles = [complex(re, im) for re, im in rec.get("poles", [])]
        residues = [complex(re, im) for re, im in rec.get("residues", [])]
        return cls(np.array(poles, complex), np.array(residues, complex))


def kernel_eval(prs: PoleResidueSet, t):
    """Memory kernel ``sum_l r_l exp(-1j z_l t)`` (no causal prefactor)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValidationError("kernel is only defined for t >= 0")
    if len(prs) == 0:
        out = np.zeros(t.shape, complex)
    else:
        out = np.exp(-1j * np.multiply.outer(t, prs.poles)) @ prs.residues
    return out if out.ndim else complex(out)


def self_energy_eval(prs: PoleResidueSet, z):
    """Rational self-energy ``sum_l r_l / (z - z_l)``."""
    z = as_complex_array(z)
    if len(prs) == 0:
        out = np.zeros(z.shape, complex)
        return out if out.ndim else complex(out)
    diff = np.subtract.outer(z, prs.poles)
    if np.any(np.abs(diff) < POLE_GUARD):
        raise PoleProximityError("self-energy evaluated on a pole")
    out = (1.0 / diff) @ prs.residues
    return out if out.ndim else complex(out)
