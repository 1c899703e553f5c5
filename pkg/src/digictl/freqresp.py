"""Frequency response, Bode sweeps and gain/phase stability margins."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NyquistViolation
from .polytf import TransferFunction, evaluate
from .xform import warp_frequency

SCAN_POINTS = 2000
SCAN_OMEGA_MIN = 1e-3
S_DOMAIN_OMEGA_MAX = 1e3


@dataclass(frozen=True)
class FrequencyPoint:
    omega: float
    mag_db: float
    phase_deg: float


@dataclass(frozen=True)
class StabilityMargins:
    """Gain/phase margins. Absent crossovers are ``None``.

    For Z-domain loops the crossover frequencies are true frequencies and the
    ``*_warped`` fields carry their w-plane images; for S/W loops both agree.
    """

    phase_margin_deg: Optional[float]
    gain_crossover: Optional[float]
    gain_margin_db: Optional[float]
    phase_crossover: Optional[float]
    gain_crossover_warped: Optional[float] = None
    phase_crossover_warped: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "phase_margin_deg": self.phase_margin_deg,
            "gain_crossover_rad_s": self.gain_crossover,
            "gain_crossover_warped_rad_s": self.gain_crossover_warped,
            "gain_margin_db": self.gain_margin_db,
            "phase_crossover_rad_s": self.phase_crossover,
            "phase_crossover_warped_rad_s": self.phase_crossover_warped,
        }


def eval_point(tf: TransferFunction, omega: float) -> complex:
    kind = tf.domain.kind
    if kind == "Z":
        if omega >= math.pi / tf.T or omega < 0:
            raise NyquistViolation(f"omega={omega} outside [0, pi/T) for {tf.domain!r}")
        return cmath.exp(1j * omega * tf.T)
    return 1j * omega


def response_at(tf: TransferFunction, omega: float) -> complex:
    """Complex response at jw (S, W) or exp(jwT) (Z)."""
    return complex(evaluate(tf, eval_point(tf, omega)))


def _responses(tf: TransferFunction, omegas: np.ndarray) -> np.ndarray:
    return np.array([response_at(tf, float(w)) for w in omegas])


def _dc_order(tf: TransferFunction) -> int:
    """Number of DC poles minus DC zeros (integrators count positive)."""
    x0 = tf.domain.dc_point

    def multiplicity(p):
        if p.is_zero():
            return 0
        m = 0
        c = np.asarray(p.coeffs, dtype=float)
        while len(c) > 1:
            scale = np.sum(np.abs(c))
            if abs(np.polynomial.polynomial.polyval(x0, c)) > 1e-12 * scale:
                break
            q, _ = np.polynomial.polynomial.polydiv(c, [-x0, 1.0])
            c = q
            m += 1
        return m

    return multiplicity(tf.den) - multiplicity(tf.num)


def unwrapped_phase(tf: TransferFunction, omegas: np.ndarray, resp: np.ndarray | None = None) -> np.ndarray:
    if resp is None:
        resp = _responses(tf, omegas)
    ph = np.degrees(np.unwrap(np.angle(resp)))
    anchor = -90.0 * _dc_order(tf)
    return ph - 360.0 * np.round((ph[0] - anchor) / 360.0)


def bode_sweep(tf: TransferFunction, omega_min: float, omega_max: float, points: int) -> list[FrequencyPoint]:
    if not 0 < omega_min < omega_max:
        raise ValueError(f"need 0 < omega_min < omega_max, got {omega_min}, {omega_max}")
    if points < 2:
        raise ValueError("a sweep needs at least two points")
    if tf.domain.kind == "Z" and omega_max >= math.pi / tf.T:
        raise NyquistViolation(f"omega_max={omega_max} not below pi/T={math.pi / tf.T:.6g}")
    omegas = np.logspace(math.log10(omega_min), math.log10(omega_max), points)
    resp = _responses(tf, omegas)
    ph = unwrapped_phase(tf, omegas, resp)
    mag = 20.0 * np.log10(np.abs(resp))
    return [FrequencyPoint(float(w), float(m), float(p)) for w, m, p in zip(omegas, mag, ph)]


def scan_band(tf: TransferFunction) -> tuple[float, float]:
    kind = tf.domain.kind
    if kind == "Z":
        return SCAN_OMEGA_MIN, 0.999 * math.pi / tf.T
    if kind == "W":
        return SCAN_OMEGA_MIN, warp_frequency(0.999 * math.pi / tf.T, tf.T)
    return SCAN_OMEGA_MIN, S_DOMAIN_OMEGA_MAX


def _refine(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=1e-14 * b, rtol=1e-14, maxiter=500)


def margins(open_loop: TransferFunction, band: tuple[float, float] | None = None) -> StabilityMargins:
    """Worst-case gain and phase margins of a SISO loop.

    Crossovers are bracketed on a dense log grid and refined with a bracketing
    root finder. When several crossovers exist the smallest margin is kept.
    """
    lo, hi = band or scan_band(open_loop)
    omegas = np.logspace(math.log10(lo), math.log10(hi), SCAN_POINTS)
    resp = _responses(open_loop, omegas)
    mag = np.abs(resp)
    ph = unwrapped_phase(open_loop, omegas, resp)

    def phase_near(w, ref_deg):
        # phase at w, unwrapped against a nearby grid value
        d = math.degrees(cmath.phase(response_at(open_loop, w))) - ref_deg
        return ref_deg + (d + 180.0) % 360.0 - 180.0

    pm = wc = None
    for i in np.nonzero(np.diff(np.sign(mag - 1.0)) != 0)[0]:
        a, b = omegas[i], omegas[i + 1]
        w = _refine(lambda x: abs(response_at(open_loop, x)) - 1.0, a, b)
        cand = 180.0 + phase_near(w, ph[i])
        if pm is None or cand < pm:
            pm, wc = cand, w

    gm = wp = None
    kmin = math.floor((ph.min() + 180.0) / 360.0)
    kmax = math.ceil((ph.max() + 180.0) / 360.0)
    for k in range(kmin, kmax + 1):
        target = -180.0 + 360.0 * k
        for i in np.nonzero(np.diff(np.sign(ph - target)) != 0)[0]:
            a, b = omegas[i], omegas[i + 1]
            ref = ph[i]
            w = _refine(lambda x: phase_near(x, ref) - target, a, b)
            cand = -20.0 * math.log10(abs(response_at(open_loop, w)))
            if gm is None or cand < gm:
                gm, wp = cand, w

    def warped(w):
        if w is None or open_loop.domain.kind != "Z":
            return w
        return warp_frequency(w, open_loop.T)

    def f(x):
        return None if x is None else float(x)

    return StabilityMargins(
        phase_margin_deg=f(pm),
        gain_crossover=f(wc),
        gain_margin_db=f(gm),
        phase_crossover=f(wp),
        gain_crossover_warped=warped(wc),
        phase_crossover_warped=warped(wp),
    )
