"""Real polynomials and domain-tagged rational transfer functions.

Coefficients are stored in ascending power order: ``coeffs[k]`` multiplies
``x**k``. Values are immutable; every operation returns a new object and no
pole-zero cancellation is ever performed implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import Degenerate, DomainMismatch, PoleHit

# relative threshold below which leading coefficients are dropped
STRIP_RTOL = 1e-14
ROOT_RESIDUAL_RTOL = 1e-10


def _strip(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    if not c:
        return (0.0,)
    scale = max(abs(x) for x in c)
    if scale == 0.0:
        return (0.0,)
    while len(c) > 1 and abs(c[-1]) < STRIP_RTOL * scale:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _strip(list(coeffs)))

    @classmethod
    def from_descending(cls, coeffs: Iterable[float]) -> Polynomial:
        return cls(list(coeffs)[::-1])

    @classmethod
    def from_roots(cls, roots: Iterable[complex], gain: float = 1.0) -> Polynomial:
        c = np.array([gain], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(np.real_if_close(c, tol=1e6).real)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def lead(self) -> float:
        return self.coeffs[-1]

    def descending(self) -> list[float]:
        return list(self.coeffs[::-1])

    def __call__(self, x):
        # Horner
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __neg__(self) -> Polynomial:
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial([c * float(other) for c in self.coeffs])

    __rmul__ = __mul__

    def derivative(self) -> Polynomial:
        return Polynomial(npoly.polyder(self.coeffs)) if self.degree() > 0 else Polynomial([0.0])

    def max_abs_coeff(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def roots(self) -> list[complex]:
        return roots(self)


class Domain:
    """Evaluation domain: continuous ``S``, or sampled ``Z``/``W`` with period T."""

    __slots__ = ("kind", "sample_period")

    def __init__(self, kind: str, sample_period: float | None = None):
        if kind not in ("S", "Z", "W"):
            raise ValueError(f"unknown domain kind {kind!r}")
        if kind == "S":
            sample_period = None
        elif sample_period is None or not sample_period > 0:
            raise ValueError(f"{kind} domain needs a positive sample period, got {sample_period!r}")
        self.kind = kind
        self.sample_period = None if sample_period is None else float(sample_period)

    @classmethod
    def s(cls) -> Domain:
        return cls("S")

    @classmethod
    def z(cls, T: float) -> Domain:
        return cls("Z", T)

    @classmethod
    def w(cls, T: float) -> Domain:
        return cls("W", T)

    @property
    def is_discrete(self) -> bool:
        return self.kind == "Z"

    @property
    def dc_point(self) -> float:
        return 1.0 if self.kind == "Z" else 0.0

    def __eq__(self, other):
        return (
            isinstance(other, Domain)
            and self.kind == other.kind
            and self.sample_period == other.sample_period
        )

    def __hash__(self):
        return hash((self.kind, self.sample_period))

    def __repr__(self):
        return self.kind if self.kind == "S" else f"{self.kind}(T={self.sample_period:g})"


@dataclass(frozen=True)
class TransferFunction:
    num: Polynomial
    den: Polynomial
    domain: Domain

    def __post_init__(self):
        if not isinstance(self.num, Polynomial):
            object.__setattr__(self, "num", Polynomial(self.num))
        if not isinstance(self.den, Polynomial):
            object.__setattr__(self, "den", Polynomial(self.den))
        if self.den.is_zero():
            raise ValueError("transfer function denominator is the zero polynomial")

    @classmethod
    def from_descending(cls, num, den, domain: Domain) -> TransferFunction:
        return cls(Polynomial.from_descending(num), Polynomial.from_descending(den), domain)

    @classmethod
    def gain(cls, k: float, domain: Domain) -> TransferFunction:
        return cls(Polynomial([k]), Polynomial([1.0]), domain)

    @property
    def T(self) -> float | None:
        return self.domain.sample_period

    def is_strictly_proper(self) -> bool:
        return self.num.is_zero() or self.num.degree() < self.den.degree()

    def normalized(self) -> TransferFunction:
        """Same function with a monic denominator."""
        k = self.den.lead
        return TransferFunction(self.num * (1.0 / k), self.den * (1.0 / k), self.domain)

    def __call__(self, x: complex) -> complex:
        return evaluate(self, x)

    def poles(self) -> list[complex]:
        return roots(self.den) if self.den.degree() >= 1 else []

    def zeros(self) -> list[complex]:
        return roots(self.num) if self.num.degree() >= 1 else []

    def __repr__(self):
        return f"TransferFunction(num={self.num.descending()}, den={self.den.descending()}, {self.domain!r})"


def evaluate(tf: TransferFunction, x: complex) -> complex:
    d = tf.den(x)
    if d == 0:
        raise PoleHit(f"evaluation point {x!r} is a pole")
    return tf.num(x) / d


def _check_same(a: TransferFunction, b: TransferFunction) -> None:
    if a.domain != b.domain:
        raise DomainMismatch(f"cannot combine {a.domain!r} with {b.domain!r}")


def series(a: TransferFunction, b: TransferFunction) -> TransferFunction:
    _check_same(a, b)
    return TransferFunction(a.num * b.num, a.den * b.den, a.domain)


def unity_feedback(open_loop: TransferFunction) -> TransferFunction:
    if not open_loop.domain.is_discrete:
        raise DomainMismatch(f"unity feedback is only defined for Z-domain loops, got {open_loop.domain!r}")
    return TransferFunction(open_loop.num, open_loop.den + open_loop.num, open_loop.domain)


def roots(p: Polynomial) -> list[complex]:
    """All complex roots of ``p``, Newton-polished to a small residual."""
    if p.degree() < 1:
        raise Degenerate("constant polynomial has no roots")
    c = np.asarray(p.coeffs, dtype=float)
    tol = ROOT_RESIDUAL_RTOL * np.max(np.abs(c))
    dp = npoly.polyder(c)
    out = []
    for r in npoly.polyroots(c):
        r = complex(r)
        best, best_res = r, abs(npoly.polyval(r, c))
        for _ in range(60):
            if best_res < tol * 1e-3:
                break
            d = npoly.polyval(r, dp)
            if d == 0:
                break
            r = r - npoly.polyval(r, c) / d
            res = abs(npoly.polyval(r, c))
            if res < best_res:
                best, best_res = r, res
        out.append(best)
    return out


def _deflate(p: Polynomial, x0: float) -> Polynomial:
    # synthetic division by (x - x0), remainder discarded
    desc = p.descending()
    q = [desc[0]]
    for c in desc[1:-1]:
        q.append(c + q[-1] * x0)
    return Polynomial.from_descending(q)


def _vanishes(p: Polynomial, x0: float) -> bool:
    scale = sum(abs(c) * abs(x0) ** k for k, c in enumerate(p.coeffs))
    return p.degree() >= 1 and abs(p(x0)) <= 1e-12 * scale


def dc_gain(tf: TransferFunction) -> float:
    """Gain at s=0 / w=0 / z=1; ``math.inf`` when that point is a pole.

    Common factors at the DC point are divided out before evaluating, so an
    uncancelled ``(z-1)/(z-1)`` reports 1 rather than a pole.
    """
    x0 = tf.domain.dc_point
    num, den = tf.num, tf.den
    while _vanishes(den, x0):
        if num.is_zero():
            return 0.0
        if not _vanishes(num, x0):
            return math.inf
        num, den = _deflate(num, x0), _deflate(den, x0)
    return float(np.real(num(x0) / den(x0)))
