"""Continuous-to-discrete and z <-> w plane transformations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BandViolation,
    DomainMismatch,
    ImproperPlant,
    NyquistViolation,
    RepeatedPoleUnsupported,
)
from .polytf import Domain, Polynomial, TransferFunction

# roots closer than this (relative) are treated as one repeated pole
POLE_CLUSTER_RTOL = 1e-6


def _binomial_power(a: float, b: float, n: int) -> np.ndarray:
    """Ascending coefficients of (a + b*x)**n from exact binomials."""
    return np.array([math.comb(n, k) * a ** (n - k) * b**k for k in range(n + 1)], dtype=float)


def _mobius_substitute(p: Polynomial, a: float, b: float, c: float, d: float, n: int) -> Polynomial:
    """Coefficients of p((a + b x)/(c + d x)) * (c + d x)**n."""
    out = np.zeros(n + 1)
    for k, pk in enumerate(p.coeffs):
        if pk == 0.0:
            continue
        term = np.convolve(_binomial_power(a, b, k), _binomial_power(c, d, n - k))
        out[: len(term)] += pk * term
    return Polynomial(out)


def bilinear_z_to_w(tf_z: TransferFunction) -> TransferFunction:
    """Substitute z = (1 + (T/2) w) / (1 - (T/2) w)."""
    if tf_z.domain.kind != "Z":
        raise DomainMismatch(f"expected a Z-domain transfer function, got {tf_z.domain!r}")
    T = tf_z.T
    h = T / 2.0
    n = max(tf_z.num.degree(), tf_z.den.degree())
    num = _mobius_substitute(tf_z.num, 1.0, h, 1.0, -h, n)
    den = _mobius_substitute(tf_z.den, 1.0, h, 1.0, -h, n)
    return TransferFunction(num, den, Domain.w(T))


def bilinear_w_to_z(tf_w: TransferFunction) -> TransferFunction:
    """Substitute w = (2/T) (z - 1) / (z + 1)."""
    if tf_w.domain.kind != "W":
        raise DomainMismatch(f"expected a W-domain transfer function, got {tf_w.domain!r}")
    T = tf_w.T
    g = 2.0 / T
    n = max(tf_w.num.degree(), tf_w.den.degree())
    num = _mobius_substitute(tf_w.num, -g, g, 1.0, 1.0, n)
    den = _mobius_substitute(tf_w.den, -g, g, 1.0, 1.0, n)
    return TransferFunction(num, den, Domain.z(T))


def warp_frequency(omega: float, T: float) -> float:
    """True frequency on the unit circle -> w-plane frequency."""
    if omega < 0 or omega >= math.pi / T:
        raise NyquistViolation(f"omega={omega} outside [0, pi/T={math.pi / T:.6g})")
    return 2.0 / T * math.tan(omega * T / 2.0)


def unwarp_frequency(omega_w: float, T: float) -> float:
    if omega_w < 0:
        raise ValueError(f"warped frequency must be non-negative, got {omega_w}")
    return 2.0 / T * math.atan(omega_w * T / 2.0)


@dataclass(frozen=True)
class FirstOrderWController:
    """D(w) = a0 (1 + w/omega_w0) / (1 + w/omega_wp)."""

    a0: float
    omega_w0: float
    omega_wp: float
    T: float

    def __post_init__(self):
        for name in ("a0", "omega_w0", "omega_wp", "T"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    def to_w(self) -> TransferFunction:
        num = Polynomial([self.a0, self.a0 / self.omega_w0])
        den = Polynomial([1.0, 1.0 / self.omega_wp])
        return TransferFunction(num, den, Domain.w(self.T))


def realize_first_order(ctrl: FirstOrderWController) -> TransferFunction:
    """Closed-form z-plane realization Kd (z - z0) / (z - zp) of a first-order D(w)."""
    g = 2.0 / ctrl.T
    for name in ("omega_w0", "omega_wp"):
        if getattr(ctrl, name) >= g:
            raise BandViolation(f"{name}={getattr(ctrl, name)} must be below 2/T={g}")
    w0, wp = ctrl.omega_w0, ctrl.omega_wp
    kd = ctrl.a0 * wp * (w0 + g) / (w0 * (wp + g))
    z0 = (g - w0) / (g + w0)
    zp = (g - wp) / (g + wp)
    return TransferFunction(Polynomial([-kd * z0, kd]), Polynomial([-zp, 1.0]), Domain.z(ctrl.T))


def _cluster_roots(rts):
    groups: list[list[complex]] = []
    for r in rts:
        for grp in groups:
            ref = grp[0]
            if abs(r - ref) <= POLE_CLUSTER_RTOL * max(1.0, abs(ref)):
                grp.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _poly_c(coeffs) -> np.ndarray:
    return np.asarray(coeffs, dtype=complex)


def _pval(c, x):
    acc = 0j
    for v in reversed(c):
        acc = acc * x + v
    return acc


def zoh_discretize(ct: TransferFunction, T: float) -> TransferFunction:
    """Exact zero-order-hold equivalent of a strictly proper continuous plant.

    Uses G(z) = (1 - 1/z) Z{G(s)/s}, with G(s)/s expanded in partial fractions.
    Poles of G(s)/s may be simple or double.
    """
    if ct.domain.kind != "S":
        raise DomainMismatch(f"expected an S-domain plant, got {ct.domain!r}")
    if not T > 0:
        raise ValueError(f"sample period must be positive, got {T!r}")
    if not ct.is_strictly_proper():
        raise ImproperPlant("zero-order hold needs a strictly proper plant (deg num < deg den)")
    if ct.num.is_zero():
        return TransferFunction(Polynomial([0.0]), Polynomial([1.0]), Domain.z(T))

    # F(s) = G(s)/s = N(s) / (lead * s^m0 * prod (s - p)^m); origin poles counted exactly
    den = list(ct.den.coeffs)
    m0 = 1
    while den[0] == 0.0:
        den.pop(0)
        m0 += 1
    rest = Polynomial(den)
    lead = rest.lead
    poles = [(0j, m0)]
    if rest.degree() >= 1:
        poles += _cluster_roots(rest.roots())
    for p, m in poles:
        if m > 2:
            raise RepeatedPoleUnsupported(f"pole at s={p:.6g} has multiplicity {m} in G(s)/s")

    num_c = _poly_c(ct.num.coeffs)

    def q_factor(skip):
        # lead * product over the other poles, as a callable with derivative
        c = np.array([lead], dtype=complex)
        for j, (p, m) in enumerate(poles):
            if j != skip:
                for _ in range(m):
                    c = np.convolve(c, [-p, 1.0])
        return c

    # z-plane denominator of Z{F}: prod (z - e^{pT})^m, with one (z - 1) removed by the hold
    qs = [(complex(np.exp(p * T)) if p != 0 else 1.0 + 0j, m) for p, m in poles]
    dz_full = np.array([1.0 + 0j])
    for q, m in qs:
        for _ in range(m):
            dz_full = np.convolve(dz_full, [-q, 1.0])

    def cofactor(i, k):
        c = np.array([1.0 + 0j])
        for j, (q, m) in enumerate(qs):
            for _ in range(m - (k if j == i else 0)):
                c = np.convolve(c, [-q, 1.0])
        return c

    n_z = np.zeros(len(dz_full), dtype=complex)
    for i, (p, m) in enumerate(poles):
        qc = q_factor(i)
        q_at = _pval(qc, p)
        n_at = _pval(num_c, p)
        zq = qs[i][0]
        if m == 1:
            r = n_at / q_at
            # r/(s-p) -> r z/(z-q); the z is absorbed by the hold's (z-1)/z
            term = r * cofactor(i, 1)
        else:
            a = n_at / q_at
            dq = np.polynomial.polynomial.polyder(qc) if len(qc) > 1 else np.array([0j])
            dn = np.polynomial.polynomial.polyder(num_c) if len(num_c) > 1 else np.array([0j])
            b = (_pval(dn, p) * q_at - n_at * _pval(dq, p)) / q_at**2
            # a/(s-p)^2 -> a T q z/(z-q)^2 ; b/(s-p) -> b z/(z-q)
            term = np.zeros(len(dz_full), dtype=complex)
            t2 = a * T * zq * cofactor(i, 2)
            t1 = b * cofactor(i, 1)
            term[: len(t2)] += t2
            term[: len(t1)] += t1
        n_z[: len(term)] += term

    # dividing the full denominator by the (z - 1) contributed by the hold
    dz = np.array([1.0 + 0j])
    removed = False
    for q, m in qs:
        for _ in range(m):
            if not removed and q == 1.0:
                removed = True
                continue
            dz = np.convolve(dz, [-q, 1.0])
    n_deg = len(dz) - 2
    num = Polynomial(n_z.real[: n_deg + 1])
    return TransferFunction(num, Polynomial(dz.real), Domain.z(T))
