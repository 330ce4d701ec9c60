"""Kerr-coupled bosonic mode networks and their number-conserving sectors.

A network holds up to four modes ``a, b, c, d`` (indices 0..3) with
frequencies, self-Kerr coefficients, a symmetric cross-Kerr matrix, and one
number-conserving exchange term. The diagonal part of the Hamiltonian is::

    E(n) = sum_i n_i w_i + sum_i K_i/2 n_i (n_i - 1) + sum_{i<j} chi_ij n_i n_j

and the exchange term moves one "quantum of the channel" along a fixed
occupation shift vector (e.g. ``(-1, +1)`` for ``g (a^dag b + b^dag a)``).
Within a fixed set of conserved charges the Hamiltonian is a finite
tridiagonal chain, enumerated by :func:`enumerate_sector`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._validation import check_int, check_real
from .exceptions import ChannelUndefinedError, EmptySectorError, ValidationError

MAX_SECTOR_DIM = 10**6

MODE_LABELS = "abcd"


class CouplingKind(str, enum.Enum):
    BILINEAR2 = "bilinear2"    # g (a^dag b + h.c.)
    THREE_WAVE = "three_wave"  # g (a b c^dag + h.c.)
    BILINEAR4 = "bilinear4"    # g (c d^dag + h.c.)
    FOUR_WAVE = "four_wave"    # g (a b c^dag d^dag + h.c.)


# occupation change of one forward channel step, per kind
CHANNEL_SHIFT = {
    CouplingKind.BILINEAR2: (-1, 1),
    CouplingKind.THREE_WAVE: (-1, -1, 1),
    CouplingKind.BILINEAR4: (0, 0, -1, 1),
    CouplingKind.FOUR_WAVE: (-1, -1, 1, 1),
}

# names of the conserved charges that label a sector, per kind
CHARGE_NAMES = {
    CouplingKind.BILINEAR2: ("N",),
    CouplingKind.THREE_WAVE: ("Q", "D"),
    CouplingKind.BILINEAR4: ("N", "D", "A"),
    CouplingKind.FOUR_WAVE: ("N", "D", "F"),
}


def n_modes_for(kind):
    return len(CHANNEL_SHIFT[CouplingKind(kind)])


@dataclass(frozen=True)
class Mode:
    omega: float
    kerr: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega", check_real(self.omega, "omega"))
        object.__setattr__(self, "kerr", check_real(self.kerr, "kerr"))


@dataclass(frozen=True)
class Coupling:
    """Exchange term. ``g`` is stored real and non-negative."""

    kind: CouplingKind
    g: float

    def __post_init__(self):
        try:
            kind = CouplingKind(self.kind)
        except ValueError:
            valid = ", ".join(k.value for k in CouplingKind)
            raise ValidationError(
                f"unknown coupling kind {self.kind!r}; expected one of {valid}"
            ) from None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "g", check_real(self.g, "coupling.g", nonnegative=True))


@dataclass(frozen=True)
class ModeNetwork:
    """Immutable parameter set of a Kerr mode network.

    Parameters
    ----------
    modes : sequence of Mode
        Two to four modes, in channel order ``a, b, c, d``.
    cross_kerr : array_like, shape (M, M)
        Symmetric cross-Kerr matrix with zero diagonal.
    coupling : Coupling
        The exchange term; its kind fixes the required mode count.
    drive_mode : int, optional
        Index of the mode treated as a classical pump by the stiff-pump
        reduction. Only meaningful for four-wave networks.
    """

    modes: tuple
    cross_kerr: np.ndarray
    coupling: Coupling
    drive_mode: int | None = None

    def __post_init__(self):
        modes = tuple(m if isinstance(m, Mode) else Mode(*m) for m in self.modes)
        if len(modes) not in (2, 3, 4):
            raise ValidationError(f"mode count must be 2, 3 or 4, got {len(modes)}")
        coupling = self.coupling
        if not isinstance(coupling, Coupling):
            coupling = Coupling(*coupling)
        if n_modes_for(coupling.kind) != len(modes):
            raise ValidationError(
                f"coupling {coupling.kind.value} needs {n_modes_for(coupling.kind)} "
                f"modes, network has {len(modes)}"
            )
        chi = np.array(self.cross_kerr, dtype=float)
        if chi.shape != (len(modes), len(modes)):
            raise ValidationError(
                f"cross_kerr must have shape {(len(modes), len(modes))}, got {chi.shape}"
            )
        if not np.all(np.isfinite(chi)):
            raise ValidationError("cross_kerr contains non-finite entries")
        if not np.array_equal(chi, chi.T):
            raise ValidationError("cross_kerr must be symmetric")
        if np.any(np.diag(chi) != 0):
            raise ValidationError("cross_kerr diagonal must be zero")
        chi.setflags(write=False)
        if self.drive_mode is not None:
            d = check_int(self.drive_mode, "drive_mode", nonnegative=True)
            if d >= len(modes):
                raise ValidationError(f"drive_mode {d} out of range")
            object.__setattr__(self, "drive_mode", d)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "cross_kerr", chi)

    @classmethod
    def build(cls, omegas, kerrs=None, cross_kerr=None, *, kind, g, drive_mode=None):
        """Convenience constructor from plain arrays."""
        omegas = list(omegas)
        kerrs = [0.0] * len(omegas) if kerrs is None else list(kerrs)
        if len(kerrs) != len(omegas):
            raise ValidationError("kerrs and omegas differ in length")
        if cross_kerr is None:
            cross_kerr = np.zeros((len(omegas), len(omegas)))
        return cls(
            tuple(Mode(w, k) for w, k in zip(omegas, kerrs)),
            cross_kerr,
            Coupling(kind, g),
            drive_mode,
        )

    @property
    def n_modes(self):
        return len(self.modes)

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])

    @property
    def kerrs(self):
        return np.array([m.kerr for m in self.modes])

    @property
    def kind(self):
        return self.coupling.kind

    @property
    def g(self):
        return self.coupling.g

    def chi(self, i, j):
        return float(self.cross_kerr[i, j])

    def with_coupling(self, g):
        return ModeNetwork(self.modes, self.cross_kerr, Coupling(self.kind, g), self.drive_mode)

    def to_dict(self):
        out = {
            "modes": [{"omega": m.omega, "kerr": m.kerr} for m in self.modes],
            "cross_kerr": [list(map(float, row)) for row in self.cross_kerr],
            "coupling": {"kind": self.kind.value, "g": self.g},
        }
        if self.drive_mode is not None:
            out["drive_mode"] = self.drive_mode
        return out

    @classmethod
    def from_dict(cls, data: Mapping):
        """Parse the structured-text layout produced by :meth:`to_dict`.

        Missing or malformed fields raise ValidationError naming the field.
        """
        if "modes" not in data:
            raise ValidationError("missing field: modes")
        raw_modes = data["modes"]
        if not isinstance(raw_modes, Sequence) or isinstance(raw_modes, str):
            raise ValidationError("field modes must be an array of tables")
        modes = []
        for i, m in enumerate(raw_modes):
            if not isinstance(m, Mapping) or "omega" not in m:
                raise ValidationError(f"missing field: modes[{i}].omega")
            modes.append(
                Mode(
                    check_real(m["omega"], f"modes[{i}].omega"),
                    check_real(m.get("kerr", 0.0), f"modes[{i}].kerr"),
                )
            )
        coupling = data.get("coupling")
        if not isinstance(coupling, Mapping):
            raise ValidationError("missing field: coupling")
        for key in ("kind", "g"):
            if key not in coupling:
                raise ValidationError(f"missing field: coupling.{key}")
        chi = data.get("cross_kerr")
        if chi is None:
            chi = np.zeros((len(modes), len(modes)))
        try:
            chi = np.array(chi, dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("field cross_kerr must be a numeric matrix") from None
        return cls(
            tuple(modes),
            chi,
            Coupling(coupling["kind"], check_real(coupling["g"], "coupling.g")),
            data.get("drive_mode"),
        )


def _as_state(net, state, *, allow_negative=False):
    s = tuple(int(check_int(x, "occupation")) for x in state)
    if len(s) != net.n_modes:
        raise ValidationError(
            f"state {s} has {len(s)} occupations, network has {net.n_modes} modes"
        )
    if not allow_negative and any(x < 0 for x in s):
        raise ValidationError(f"negative occupation in {s}")
    return s


def diagonal_energy(net: ModeNetwork, state) -> float:
    """Bare (number-diagonal) energy of a Fock state."""
    n = np.asarray(_as_state(net, state), dtype=float)
    energy = float(np.dot(n, net.omegas))
    energy += float(np.dot(0.5 * net.kerrs, n * (n - 1)))
    energy += 0.5 * float(n @ net.cross_kerr @ n)
    return energy


def matrix_element(net: ModeNetwork, source, target) -> float:
    """Coupling amplitude <target|V|source>; zero off-channel.

    Negative occupations are accepted and give zero, so the lowering of an
    empty mode needs no special casing by the caller.
    """
    s = _as_state(net, source, allow_negative=True)
    t = _as_state(net, target, allow_negative=True)
    if min(s) < 0 or min(t) < 0:
        return 0.0
    shift = CHANNEL_SHIFT[net.kind]
    diff = tuple(b - a for a, b in zip(s, t))
    if diff == shift:
        lo = s
    elif diff == tuple(-x for x in shift):
        lo = t
    else:
        return 0.0
    # amplitude of the forward step out of ``lo``
    prod = 1
    for n, step in zip(lo, shift):
        if step < 0:
            prod *= n
        elif step > 0:
            prod *= n + 1
    return net.g * math.sqrt(prod)


def channel_target(net: ModeNetwork, source):
    """Partner state reached by one forward channel step."""
    s = _as_state(net, source)
    return tuple(n + d for n, d in zip(s, CHANNEL_SHIFT[net.kind]))


def channel_m2(net: ModeNetwork, source) -> int:
    """Squared channel matrix element divided by g**2 (the |M|^2 row)."""
    n = _as_state(net, source)
    kind = net.kind
    if kind is CouplingKind.BILINEAR2:
        return n[0] * (n[1] + 1)
    if kind is CouplingKind.THREE_WAVE:
        return n[0] * n[1] * (n[2] + 1)
    if kind is CouplingKind.BILINEAR4:
        return n[2] * (n[3] + 1)
    return n[0] * n[1] * (n[2] + 1) * (n[3] + 1)


def _require_source(net, s):
    kind = net.kind
    if kind is CouplingKind.BILINEAR2 and s[0] < 1:
        raise ChannelUndefinedError(f"channel undefined at {s}: needs n >= 1")
    if kind in (CouplingKind.THREE_WAVE, CouplingKind.FOUR_WAVE) and (s[0] < 1 or s[1] < 1):
        raise ChannelUndefinedError(f"channel undefined at {s}: needs n >= 1 and m >= 1")
    if kind is CouplingKind.BILINEAR4 and s[2] < 1:
        raise ChannelUndefinedError(f"channel undefined at {s}: needs l >= 1")


def transition_frequencies(net: ModeNetwork, source) -> tuple[float, float]:
    """Occupation-conditioned (retained, eliminated) transition frequencies.

    These are the closed forms of the local exchange channel; by construction
    ``E(source) - E(target) == omega_alpha - omega_beta``.
    """
    s = _as_state(net, source)
    _require_source(net, s)
    w, K = net.omegas, net.kerrs
    x = net.cross_kerr
    kind = net.kind
    if kind is CouplingKind.BILINEAR2:
        n, m = s
        alpha = w[0] + K[0] * (n - 1) + x[0, 1] * m
        beta = w[1] + K[1] * m + x[0, 1] * (n - 1)
    elif kind is CouplingKind.THREE_WAVE:
        n, m, l = s
        alpha = (
            w[0] + w[1] + K[0] * (n - 1) + K[1] * (m - 1)
            + x[0, 1] * (n + m - 1) + (x[0, 2] + x[1, 2]) * l
        )
        beta = w[2] + K[2] * l + x[0, 2] * (n - 1) + x[1, 2] * (m - 1)
    elif kind is CouplingKind.BILINEAR4:
        n, m, l, k = s
        alpha = w[2] + K[2] * (l - 1) + x[0, 2] * n + x[1, 2] * m + x[2, 3] * k
        # K_d k vanishes for a linear mode d
        beta = w[3] + K[3] * k + x[0, 3] * n + x[1, 3] * m + x[2, 3] * (l - 1)
    else:
        n, m, l, k = s
        alpha = w[0] + K[0] * (n - 1) + x[0, 1] * m + x[0, 2] * l + x[0, 3] * k
        beta = (
            w[2] + w[3] - w[1]
            + K[2] * l - K[1] * (m - 1) + K[3] * k
            + (x[0, 2] + x[0, 3] - x[0, 1]) * (n - 1)
            + x[1, 2] * (m - 1 - l)
            + x[1, 3] * (m - 1 - k)
            + x[2, 3] * (l + k + 1)
        )
    return float(alpha), float(beta)


def charges_of(net: ModeNetwork, state) -> dict:
    """Conserved charges of a Fock state under the network's coupling."""
    s = _as_state(net, state)
    kind = net.kind
    if kind is CouplingKind.BILINEAR2:
        return {"N": s[0] + s[1]}
    if kind is CouplingKind.THREE_WAVE:
        return {"Q": s[0] + s[1] + 2 * s[2], "D": s[0] - s[1]}
    if kind is CouplingKind.BILINEAR4:
        return {"N": sum(s), "D": s[0] - s[1], "A": s[0]}
    return {"N": sum(s), "D": s[0] - s[1], "F": s[2] - s[3]}


@dataclass(frozen=True)
class SectorBasis:
    """A fixed-charge sector laid out as a nearest-neighbour chain.

    ``states[r]`` is reached from ``states[0]`` by ``r`` forward channel
    steps; ``jumps[r]`` couples ``states[r]`` and ``states[r + 1]``.
    """

    kind: CouplingKind
    charges: dict
    states: tuple
    diagonal_energies: np.ndarray = field(repr=False)
    jumps: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return len(self.states)

    def hamiltonian(self):
        """Dense tridiagonal matrix of the sector."""
        return (
            np.diag(self.diagonal_energies)
            + np.diag(self.jumps, 1)
            + np.diag(self.jumps, -1)
        )

    def index(self, state):
        return self.states.index(tuple(state))


def _half(value, what):
    if value % 2:
        raise EmptySectorError(f"{what} is not an integer: charges have the wrong parity")
    return value // 2


def _sector_start(kind, charges):
    """First chain state and chain length from the charges."""
    if kind is CouplingKind.BILINEAR2:
        N = charges["N"]
        if N < 0:
            raise EmptySectorError(f"N={N} is negative")
        return (N, 0), N + 1
    if kind is CouplingKind.THREE_WAVE:
        Q, D = charges["Q"], charges["D"]
        A, B = _half(Q + D, "A=(Q+D)/2"), _half(Q - D, "B=(Q-D)/2")
        if A < 0 or B < 0:
            raise EmptySectorError(f"Q={Q}, D={D} give negative occupations")
        return (A, B, 0), min(A, B) + 1
    if kind is CouplingKind.BILINEAR4:
        N, D, A = charges["N"], charges["D"], charges["A"]
        B = A - D
        L = N - A - B
        if A < 0 or B < 0 or L < 0:
            raise EmptySectorError(f"N={N}, D={D}, A={A} give negative occupations")
        return (A, B, L, 0), L + 1
    N, D, F = charges["N"], charges["D"], charges["F"]
    s0 = abs(F)
    n0 = _half(N - s0 + D, "n")
    m0 = n0 - D
    l0, k0 = (s0 + F) // 2, (s0 - F) // 2
    if min(n0, m0) < 0 or N < 0:
        raise EmptySectorError(f"N={N}, D={D}, F={F} give negative occupations")
    return (n0, m0, l0, k0), min(n0, m0) + 1


def sector_dimension(net: ModeNetwork, charges: Mapping) -> int:
    kind = net.kind
    return _sector_start(kind, _check_charges(kind, charges))[1]


def _check_charges(kind, charges):
    names = CHARGE_NAMES[kind]
    missing = [c for c in names if c not in charges]
    if missing:
        raise ValidationError(f"{kind.value} sector needs charges {names}, missing {missing}")
    extra = set(charges) - set(names)
    if extra:
        raise ValidationError(f"unexpected charges {sorted(extra)} for {kind.value}")
    return {c: check_int(charges[c], c) for c in names}


def _jump(net, state):
    # closed-form chain hopping out of ``state``
    g = net.g
    kind = net.kind
    if kind is CouplingKind.BILINEAR2:
        n, m = state
        return g * math.sqrt(n * (m + 1))
    if kind is CouplingKind.THREE_WAVE:
        n, m, l = state
        return g * math.sqrt(n * m * (l + 1))
    if kind is CouplingKind.BILINEAR4:
        _, _, l, k = state
        return g * math.sqrt(l * (k + 1))
    n, m, l, k = state
    return g * math.sqrt(n * m * (l + 1) * (k + 1))


def enumerate_sector(net: ModeNetwork, charges: Mapping) -> SectorBasis:
    """Enumerate the chain basis of one conserved-charge sector.

    Charges per coupling kind: ``bilinear2`` N; ``three_wave`` Q, D;
    ``bilinear4`` N, D and the spectator occupation A of mode a;
    ``four_wave`` N, D and F = l - k.

    Raises
    ------
    EmptySectorError
        If the charges admit no state or the sector exceeds ``MAX_SECTOR_DIM``.
    """
    kind = net.kind
    charges = _check_charges(kind, charges)
    start, dim = _sector_start(kind, charges)
    if dim > MAX_SECTOR_DIM:
        raise EmptySectorError(f"sector dimension {dim} exceeds limit {MAX_SECTOR_DIM}")
    shift = CHANNEL_SHIFT[kind]
    states = tuple(tuple(x + r * d for x, d in zip(start, shift)) for r in range(dim))
    energies = np.array([diagonal_energy(net, s) for s in states])
    jumps = np.array([_jump(net, s) for s in states[:-1]])
    return SectorBasis(kind, charges, states, energies, jumps)
