"""Closed-loop assembly, step simulation and step-response metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatch, NotSettled, UnstableLoop
from .polytf import Polynomial, TransferFunction, dc_gain, series, unity_feedback

KPOT = 0.0667  # V/deg
STEP_AMPLITUDE = 0.07  # V
RISE_LOW, RISE_HIGH = 0.1, 0.9
SETTLING_BAND = 0.02


@dataclass(frozen=True)
class LoopConfig:
    """Controller D(z) in the forward path ahead of plant G(z).

    ``sensor_gain`` is an extra gain H applied to the measured output before
    it is compared with the reference, giving the loop gain H*D*G. The
    simulated signal is the sensor output H*y, which tracks the reference.
    """

    controller: TransferFunction
    plant: TransferFunction
    step_amplitude: float = STEP_AMPLITUDE
    duration: float = 150.0
    T: float = 0.1
    sensor_gain: float = 1.0
    kpot: float = KPOT

    def __post_init__(self):
        for tf in (self.controller, self.plant):
            if tf.domain.kind != "Z" or tf.T != self.T:
                raise DomainMismatch(f"loop members must be Z(T={self.T:g}), got {tf.domain!r}")
        if self.duration < 10 * self.T:
            raise ValueError(f"duration {self.duration} is shorter than 10 samples")


@dataclass(frozen=True)
class StepMetrics:
    steady_state_error: float
    percent_overshoot: float
    rise_time: float
    settling_time: float

    def as_dict(self) -> dict:
        return {
            "steady_state_error": self.steady_state_error,
            "percent_overshoot": self.percent_overshoot,
            "rise_time_s": self.rise_time,
            "settling_time_s": self.settling_time,
        }


def open_loop(cfg: LoopConfig) -> TransferFunction:
    ol = series(cfg.controller, cfg.plant)
    if cfg.sensor_gain != 1.0:
        ol = TransferFunction(ol.num * cfg.sensor_gain, ol.den, ol.domain)
    return ol


def closed_loop(cfg: LoopConfig) -> TransferFunction:
    cl = unity_feedback(open_loop(cfg))
    if cl.num.is_zero():
        return cl
    unstable = [p for p in cl.poles() if abs(p) >= 1.0]
    if unstable:
        raise UnstableLoop(unstable)
    return cl


def final_value(cfg: LoopConfig) -> float:
    """Analytic DC gain of the closed loop (exactly 1 when the loop has an integrator)."""
    k = dc_gain(open_loop(cfg))
    if math.isinf(k):
        return 1.0
    return k / (1.0 + k)


def difference_response(tf: TransferFunction, u: np.ndarray) -> np.ndarray:
    """Drive ``tf`` with input ``u`` by direct-form recursion from rest."""
    n = tf.den.degree()
    if tf.num.degree() > n:
        raise ValueError("cannot simulate an improper transfer function")
    # H(z) = B/A in powers of z^-1: index k multiplies z^(n-k)
    a = np.array(tf.den.descending(), dtype=float)
    b = np.zeros(n + 1)
    num_desc = tf.num.descending()
    b[n + 1 - len(num_desc):] = num_desc
    a0 = a[0]
    a, b = a / a0, b / a0
    y = np.zeros(len(u))
    for k in range(len(u)):
        acc = 0.0
        for i in range(n + 1):
            if k - i < 0:
                break
            acc += b[i] * u[k - i]
            if i:
                acc -= a[i] * y[k - i]
        y[k] = acc
    return y


def power_series(tf: TransferFunction, count: int) -> np.ndarray:
    """First ``count`` impulse-response samples by long division in z^-1."""
    n = tf.den.degree()
    num = np.zeros(n + 1)
    nd = tf.num.descending()
    num[n + 1 - len(nd):] = nd
    den = np.array(tf.den.descending(), dtype=float)
    rem = np.concatenate([num, np.zeros(count)])
    h = np.zeros(count)
    for k in range(count):
        q = rem[k] / den[0]
        h[k] = q
        rem[k : k + n + 1] -= q * den
    return h


def simulate_step(cfg: LoopConfig) -> tuple[np.ndarray, np.ndarray]:
    """Sampled step response ``(t, y)`` of the closed loop, in volts."""
    cl = closed_loop(cfg)
    count = math.ceil(cfg.duration / cfg.T - 1e-9) + 1
    t = np.arange(count) * cfg.T
    u = np.full(count, float(cfg.step_amplitude))
    return t, difference_response(cl, u)


def _first_crossing(t: np.ndarray, y: np.ndarray, level: float) -> float:
    above = np.nonzero(y >= level)[0]
    if len(above) == 0:
        return math.nan
    i = above[0]
    if i == 0:
        return float(t[0])
    return float(t[i - 1] + (level - y[i - 1]) / (y[i] - y[i - 1]) * (t[i] - t[i - 1]))


def step_metrics(y, final_value: float, T: float, reference: float | None = None) -> StepMetrics:
    """Overshoot, 10-90% rise time and 2% settling time around ``final_value``.

    ``final_value`` is the analytic y(inf); the steady-state error compares it
    with ``reference`` (defaults to ``final_value``).
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty response")
    if final_value == 0:
        raise ValueError("final value must be nonzero")
    reference = final_value if reference is None else reference
    t = np.arange(y.size) * T
    sign = 1.0 if final_value > 0 else -1.0
    ys, yf = sign * y, sign * final_value

    sse = abs(1.0 - final_value / reference)
    po = max(0.0, (ys.max() - yf) / yf * 100.0)

    band = SETTLING_BAND * yf
    outside = np.nonzero(np.abs(ys - yf) > band)[0]
    if len(outside) == 0:
        settling = 0.0
    else:
        k = outside[-1]
        if k == y.size - 1:
            raise NotSettled(f"response is outside the {SETTLING_BAND:.0%} band at the last sample")
        e0, e1 = abs(ys[k] - yf), abs(ys[k + 1] - yf)
        settling = float(t[k] + (e0 - band) / (e0 - e1) * T)

    t_lo = _first_crossing(t, ys, RISE_LOW * yf)
    t_hi = _first_crossing(t, ys, RISE_HIGH * yf)
    rise = 0.0 if math.isnan(t_lo) or math.isnan(t_hi) else t_hi - t_lo
    return StepMetrics(float(sse), float(po), float(rise), float(settling))


def loop_step_metrics(cfg: LoopConfig, y=None) -> StepMetrics:
    """Metrics of the loop's step response against its analytic final value."""
    if y is None:
        _, y = simulate_step(cfg)
    yf = final_value(cfg) * cfg.step_amplitude
    if yf == 0:
        # degenerate loop: measure against the commanded value
        return step_metrics(y, cfg.step_amplitude, cfg.T, reference=cfg.step_amplitude)
    return step_metrics(y, yf, cfg.T, reference=cfg.step_amplitude)
