"""Field-biased bath spectral density, frequency renormalisation and the
stiff-pump reduction of a quartic four-mode parent.

The spectral density has three pieces: an Ohmic Lorentz-Drude background,
a sharp coherent pump line (kept as a location/weight pair) and a Lorentzian
for the incoherent drive fluctuations.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from ._validation import check_complex, check_real
from .exceptions import DivergenceError, EmptySectorError, ValidationError
from .model import MAX_SECTOR_DIM, CouplingKind, Mode, ModeNetwork
from .reduction import reduce_four_wave_parent, reduce_three_mode

#: upper end of the explicit Lorentzian quadrature, in drive linewidths past the line
LORENTZ_SPAN = 50.0
QUAD_EPSREL = 1e-12


@dataclass(frozen=True)
class DriveSpec:
    g_sb: float
    mass: float
    cutoff: float
    g_e: float = 0.0
    a_rf: float = 0.0
    omega_rf: float = 0.0
    g_eb: float = 1.0
    kappa_d: float = 0.0
    omega_d: float = 0.0

    def __post_init__(self):
        for name in ("g_sb", "mass", "g_e", "omega_rf", "omega_d"):
            object.__setattr__(self, name, check_real(getattr(self, name), name))
        object.__setattr__(self, "cutoff", check_real(self.cutoff, "cutoff", positive=True))
        object.__setattr__(self, "g_eb", check_real(self.g_eb, "g_eb", positive=True))
        object.__setattr__(self, "kappa_d", check_real(self.kappa_d, "kappa_d", nonnegative=True))
        object.__setattr__(self, "a_rf", check_real(self.a_rf, "a_rf", nonnegative=True))

    @classmethod
    def from_dict(cls, data):
        fields = cls.__dataclass_fields__
        unknown = set(data) - set(fields)
        if unknown:
            raise ValidationError(f"unknown drive fields {sorted(unknown)}")
        for key in ("g_sb", "mass", "cutoff"):
            if key not in data:
                raise ValidationError(f"missing field: drive.{key}")
        return cls(**data)

    def to_dict(self):
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


class SpectralDensity(NamedTuple):
    background: float
    #: weight of the delta line sitting at ``omega_rf``
    coherent_weight: float
    lorentzian: float


def ohmic_background(spec: DriveSpec, omega):
    omega = np.asarray(omega, dtype=float)
    c2 = spec.cutoff ** 2
    return 2.0 * spec.mass * spec.g_sb / math.pi * omega * c2 / (c2 + omega ** 2)


def drive_lorentzian(spec: DriveSpec, omega, center=None):
    center = spec.omega_rf if center is None else center
    half = 0.5 * spec.g_eb
    omega = np.asarray(omega, dtype=float)
    return spec.a_rf ** 2 / (2.0 * math.pi) * half / ((omega - center) ** 2 + half ** 2)


def spectral_density(spec: DriveSpec, omega) -> SpectralDensity:
    """The three terms of the field-biased density at ``omega >= 0``."""
    omega = check_real(omega, "omega", nonnegative=True)
    return SpectralDensity(
        float(ohmic_background(spec, omega)),
        math.pi * spec.g_e ** 2 * spec.a_rf ** 2 / 2.0,
        float(drive_lorentzian(spec, omega)),
    )


class LambShiftTerms(NamedTuple):
    ohmic: float
    line: float
    lorentzian: float

    @property
    def total(self):
        return self.ohmic + self.line + self.lorentzian


def _lorentzian_shift(spec: DriveSpec):
    # The Lorentzian does not vanish at w = 0, so D/w is not integrable there.
    # Use the odd continuation D(w) - D(-w) of the drive feature, which keeps
    # the line shape near omega_rf and makes the integrand finite at zero.
    if spec.a_rf == 0:
        return 0.0
    w0 = spec.omega_rf

    def integrand(w):
        if w == 0.0:
            # limit of (L(w - w0) - L(w + w0)) / w
            half = 0.5 * spec.g_eb
            return spec.a_rf ** 2 / (2 * math.pi) * half * 4 * w0 / (w0 ** 2 + half ** 2) ** 2
        return (drive_lorentzian(spec, w) - drive_lorentzian(spec, w, center=-w0)) / w

    upper = abs(w0) + LORENTZ_SPAN * spec.g_eb
    points = [abs(w0)] if 0 < abs(w0) < upper else None
    body, _ = integrate.quad(integrand, 0.0, upper, points=points, limit=500,
                             epsabs=0.0, epsrel=QUAD_EPSREL)
    tail, _ = integrate.quad(integrand, upper, np.inf, limit=200, epsabs=0.0,
                             epsrel=QUAD_EPSREL)
    return 2.0 / math.pi * (body + tail)


def ohmic_shift_quadrature(spec: DriveSpec):
    """Ohmic part of the shift by adaptive quadrature of ``(2/pi) D(w)/w``."""
    c2 = spec.cutoff ** 2
    pref = 2.0 * spec.mass * spec.g_sb / math.pi
    val, _ = integrate.quad(lambda w: pref * c2 / (c2 + w * w), 0.0, np.inf,
                            epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
    return 2.0 / math.pi * val


def lamb_shift_terms(spec: DriveSpec, quadrature=False) -> LambShiftTerms:
    """Contributions to ``dW2 = (2/pi) int_0^inf D(w)/w dw``, term by term.

    The delta-line part is closed form and the Lorentzian part is integrated
    numerically. The Ohmic part is the closed form ``2 m g_sb cutoff / pi``
    unless ``quadrature=True``.
    """
    if spec.a_rf > 0 and spec.omega_rf == 0:
        raise DivergenceError("pump line at omega_rf = 0 gives a divergent shift")
    if quadrature:
        ohmic = ohmic_shift_quadrature(spec)
    else:
        ohmic = 2.0 * spec.mass * spec.g_sb * spec.cutoff / math.pi
    line = 0.0 if spec.a_rf == 0 else spec.g_e ** 2 * spec.a_rf ** 2 / spec.omega_rf
    return LambShiftTerms(ohmic, line, _lorentzian_shift(spec))


def lamb_shift(spec: DriveSpec, quadrature=False) -> float:
    """Static frequency renormalisation ``dW2`` of the bath plus drive."""
    return lamb_shift_terms(spec, quadrature).total


def displacement_amplitude(spec: DriveSpec) -> complex:
    """Coherent pump amplitude ``beta = g_E A_RF / (w_RF - w_d + i kappa_d / 2)``."""
    den = complex(spec.omega_rf - spec.omega_d, 0.5 * spec.kappa_d)
    if den == 0:
        raise DivergenceError("undamped resonant drive: displacement diverges")
    return spec.g_e * spec.a_rf / den


@dataclass(frozen=True)
class StiffPumpReduction:
    beta: complex
    g3_eff: complex
    #: static Stark shift chi_{mu d} |beta|^2 of each retained mode, in order
    stark_shifts: tuple
    retained_modes: tuple


def stiff_pump_reduce(net: ModeNetwork, beta, pump_frequency=0.0):
    """Replace the drive mode of a four-wave parent by a classical amplitude.

    The quartic term ``g4 (a b c^dag d^dag + h.c.)`` becomes the three-wave
    term with ``g3 = g4 conj(beta)``; cross-Kerr couplings to the drive
    become Stark shifts ``chi_{mu d} |beta|^2``. ``pump_frequency`` is added
    to the created retained mode (c, or d when c is the drive) so the
    effective network can be compared in the frame where each pump quantum
    carries that energy; the default keeps the lab-frame frequencies.

    Returns ``(effective_net, reduction)``; the network stores ``|g3|`` and
    the phase lives in ``reduction.g3_eff``.
    """
    if net.kind is not CouplingKind.FOUR_WAVE:
        raise ValidationError(f"stiff-pump reduction needs a four_wave network, got {net.kind.value}")
    if net.drive_mode is None:
        raise ValidationError("network has no drive_mode designation")
    d = net.drive_mode
    if d not in (2, 3):
        raise ValidationError(f"drive_mode must be one of the created modes (2 or 3), got {d}")
    beta = check_complex(beta, "beta")
    pump_frequency = check_real(pump_frequency, "pump_frequency")
    keep = tuple(i for i in range(4) if i != d)
    pop = abs(beta) ** 2
    shifts = tuple(net.chi(mu, d) * pop for mu in keep)
    modes = []
    for pos, mu in enumerate(keep):
        omega = net.modes[mu].omega + shifts[pos]
        if pos == 2:
            omega += pump_frequency
        modes.append(Mode(omega, net.modes[mu].kerr))
    chi = net.cross_kerr[np.ix_(keep, keep)]
    g3 = net.g * beta.conjugate()
    eff = ModeNetwork.build(
        [m.omega for m in modes], [m.kerr for m in modes], chi,
        kind=CouplingKind.THREE_WAVE, g=abs(g3),
    )
    return eff, StiffPumpReduction(beta, g3, shifts, keep)


class CollapseRow(NamedTuple):
    beta_abs: float
    k: int
    parent_plus: complex
    parent_minus: complex
    reduced_plus: complex
    reduced_minus: complex
    mismatch: float


def _collapse_row(net, beta_abs, source, hold_g3):
    if beta_abs < 0:
        raise ValidationError("|beta| must be non-negative")
    k = int(round(beta_abs ** 2))
    if k + 1 > MAX_SECTOR_DIM:
        raise EmptySectorError(f"drive occupation k={k} exceeds the sector limit")
    parent_net = net
    if hold_g3 is not None:
        if beta_abs == 0:
            raise ValidationError("cannot hold g4|beta| fixed at beta = 0")
        parent_net = net.with_coupling(hold_g3 / beta_abs)
    d = net.drive_mode
    full = list(source)
    full.insert(d, k)
    parent = reduce_four_wave_parent(parent_net, tuple(full))
    # frame where each drive quantum carries w_d + K_d k, matching the parent bookkeeping
    pump = net.modes[d].omega + net.modes[d].kerr * k
    eff, _ = stiff_pump_reduce(parent_net, beta_abs, pump_frequency=pump)
    reduced = reduce_three_mode(eff, tuple(source))
    # both channels connect the same pair of states; align on the source energy
    offset = parent.omega_alpha - reduced.omega_alpha
    rp = tuple(z + offset for z in reduced.poles)
    mismatch = max(abs(parent.poles[0] - rp[0]), abs(parent.poles[1] - rp[1]))
    return CollapseRow(float(beta_abs), k, parent.poles[0], parent.poles[1], rp[0], rp[1],
                       float(mismatch))


def collapse_diagnostic(net: ModeNetwork, beta_values, source, hold_g3=None, threads=1):
    """Compare parent and stiff-pump dressed poles across pump strengths.

    Parameters
    ----------
    net : ModeNetwork
        Four-wave parent with a ``drive_mode``.
    beta_values : sequence of float
        Pump magnitudes ``|beta|``; the parent drive occupation is
        ``k = round(|beta|**2)``.
    source : sequence of int
        Occupations ``(n, m, l)`` of the three retained modes.
    hold_g3 : float, optional
        If given, ``g4`` is rescaled to ``hold_g3 / |beta|`` for each row so
        the effective three-wave strength stays fixed.

    Reduced poles are reported shifted into the parent's frame, so the
    mismatch column is ``max |z_parent - z_reduced|`` over the two roots.
    """
    if net.kind is not CouplingKind.FOUR_WAVE or net.drive_mode is None:
        raise ValidationError("collapse diagnostic needs a four_wave network with a drive_mode")
    source = tuple(source)
    if len(source) != 3:
        raise ValidationError("source must list the three retained occupations")
    betas = [check_real(b, "beta", nonnegative=True) for b in beta_values]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda b: _collapse_row(net, b, source, hold_g3), betas))
    return [_collapse_row(net, b, source, hold_g3) for b in betas]


def collapse_order(rows):
    """Least-squares slope of ``log mismatch`` against ``log |beta|``."""
    x = np.log([r.beta_abs for r in rows])
    y = np.log([r.mismatch for r in rows])
    return float(np.polyfit(x, y, 1)[0])
