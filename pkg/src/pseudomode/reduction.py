"""Closed-form local elimination of one exchange channel.

Every case reduces to the same two-pole template: a retained line at
``omega_alpha`` coupled with strength ``sqrt(m2)`` to an eliminated line at
``omega_beta``::

    S(z) = m2 / (z - omega_beta)
    G(z) = 1 / (z - omega_alpha - S(z))
    z_pm = (wa + wb)/2 +- sqrt((wa - wb)**2 + 4 m2)/2

Only the occupation-conditioned frequencies and ``m2`` differ per case.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._validation import as_complex_array
from .exceptions import PoleProximityError, ValidationError
from .model import (
    CouplingKind,
    ModeNetwork,
    _as_state,
    channel_m2,
    charges_of,
    diagonal_energy,
    sector_dimension,
    transition_frequencies,
)
from .resolvent import dressed_poles_local

POLE_GUARD = 1e-12


class ChannelCase(str, enum.Enum):
    TWO_MODE_BILINEAR = "two_mode_bilinear"
    THREE_WAVE_MIXING = "three_wave_mixing"
    FOUR_MODE_BILINEAR = "four_mode_bilinear"
    FOUR_WAVE_PARENT = "four_wave_parent"


CASE_FOR_KIND = {
    CouplingKind.BILINEAR2: ChannelCase.TWO_MODE_BILINEAR,
    CouplingKind.THREE_WAVE: ChannelCase.THREE_WAVE_MIXING,
    CouplingKind.BILINEAR4: ChannelCase.FOUR_MODE_BILINEAR,
    CouplingKind.FOUR_WAVE: ChannelCase.FOUR_WAVE_PARENT,
}


class Validity(str, enum.Enum):
    #: the two channel states exhaust their conserved sector
    BOUNDARY_EXACT = "boundary_exact"
    #: the channel is a controlled two-state projection of a longer chain
    LOCAL_PROJECTION = "local_projection"


@dataclass(frozen=True)
class ReducedChannel:
    """Result of eliminating one channel partner.

    ``frame_offset`` is the energy removed by the rotating frame: the
    two-state block of the full Hamiltonian equals
    ``frame_offset + [[omega_alpha, sqrt(m2)], [sqrt(m2), omega_beta]]``.
    """

    case: ChannelCase
    source: tuple
    omega_alpha: float
    omega_beta: float
    m2: float
    poles: tuple
    validity: Validity = Validity.LOCAL_PROJECTION
    frame_offset: float = 0.0

    def self_energy(self, z):
        z = as_complex_array(z)
        out = self.m2 / (z - self.omega_beta)
        return out if out.ndim else complex(out)

    def green(self, z):
        return channel_green(self, z)

    def pole_residue_set(self):
        from .memory import PoleResidueSet

        return PoleResidueSet([self.omega_beta], [self.m2])

    def splitting(self):
        return float((self.poles[0] - self.poles[1]).real)

    def to_record(self):
        return {
            "case": self.case.value,
            "source": list(self.source),
            "omega_alpha": self.omega_alpha,
            "omega_beta": self.omega_beta,
            "m2": self.m2,
            "poles": [[p.real, p.imag] for p in self.poles],
            "validity": self.validity.value,
            "frame_offset": self.frame_offset,
        }

    @classmethod
    def from_record(cls, rec):
        return cls(
            ChannelCase(rec["case"]),
            tuple(int(x) for x in rec["source"]),
            float(rec["omega_alpha"]),
            float(rec["omega_beta"]),
            float(rec["m2"]),
            tuple(complex(re, im) for re, im in rec["poles"]),
            Validity(rec["validity"]),
            float(rec.get("frame_offset", 0.0)),
        )


def local_template(case, source, omega_alpha, omega_beta, m2, *, validity=Validity.LOCAL_PROJECTION,
                   frame_offset=0.0) -> ReducedChannel:
    """Generic two-pole channel from its three template inputs."""
    poles = dressed_poles_local(omega_alpha, omega_beta, m2)
    return ReducedChannel(
        ChannelCase(case), tuple(source), float(omega_alpha), float(omega_beta),
        float(m2), poles, Validity(validity), float(frame_offset),
    )


def _reduce(net: ModeNetwork, source, kind):
    if net.kind is not kind:
        raise ValidationError(
            f"{CASE_FOR_KIND[kind].value} reduction needs a {kind.value} network, "
            f"got {net.kind.value}"
        )
    s = _as_state(net, source)
    wa, wb = transition_frequencies(net, s)
    m2 = net.g ** 2 * channel_m2(net, s)
    dim = sector_dimension(net, charges_of(net, s))
    validity = Validity.BOUNDARY_EXACT if dim == 2 else Validity.LOCAL_PROJECTION
    return local_template(
        CASE_FOR_KIND[kind], s, wa, wb, m2,
        validity=validity, frame_offset=diagonal_energy(net, s) - wa,
    )


def reduce_two_mode(net, source):
    """Eliminate mode b from ``|n,m> <-> |n-1,m+1>``."""
    return _reduce(net, source, CouplingKind.BILINEAR2)


def reduce_three_mode(net, source):
    """Eliminate mode c from the three-wave channel ``|n,m,l> <-> |n-1,m-1,l+1>``."""
    return _reduce(net, source, CouplingKind.THREE_WAVE)


def reduce_four_mode(net, source):
    """Eliminate mode d from the c-d exchange; a and b are spectators."""
    return _reduce(net, source, CouplingKind.BILINEAR4)


def reduce_four_wave_parent(net, source):
    """Eliminate b, c and d together from the quartic parent channel.

    Retains mode a; the eliminated line is the composite ``-b + c + d``
    transition.
    """
    return _reduce(net, source, CouplingKind.FOUR_WAVE)


def reduce_channel(net, source):
    """Dispatch to the reduction matching the network's coupling kind."""
    return _reduce(net, source, net.kind)


def channel_green(ch: ReducedChannel, z):
    """Retained Green function in quotient form ``(z - wb) / ((z - wa)(z - wb) - m2)``."""
    z = as_complex_array(z)
    dist = np.minimum(np.abs(z - ch.poles[0]), np.abs(z - ch.poles[1]))
    if np.any(dist < POLE_GUARD):
        raise PoleProximityError("channel Green function evaluated at a dressed pole")
    out = (z - ch.omega_beta) / ((z - ch.omega_alpha) * (z - ch.omega_beta) - ch.m2)
    return out if out.ndim else complex(out)
