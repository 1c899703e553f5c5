"""Frequency-response synthesis of lag, lead, PI and PID digital controllers.

Every procedure takes a plant, a target phase margin and a w-plane crossover
frequency and returns the controller both as D(w) and D(z), along with the
intermediate quantities of the derivation.

The plant may be given in either sampled domain. A Z-domain plant is
evaluated on the unit circle at exp(j*wc*T), a W-domain plant at j*wc. The
design equations are the same for both; only the plant sample differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BandViolation, ConstraintViolated, NegativeGain, NoSolution
from .freqresp import response_at, unwrapped_phase
from .polytf import Domain, Polynomial, TransferFunction
from .xform import FirstOrderWController, bilinear_w_to_z, realize_first_order

import numpy as np
from scipy.optimize import brentq

LAG_ZERO_RATIO = 0.1
LAG_ALLOWANCE_DEG = 5.0
DEFAULT_PID_KI = 0.85


@dataclass(frozen=True)
class DesignGoal:
    phi_pm: float
    omega_wc: float
    T: float

    def __post_init__(self):
        if not 0 < self.phi_pm < 90:
            raise ValueError(f"phase margin must lie in (0, 90) degrees, got {self.phi_pm}")
        if not self.T > 0:
            raise ValueError(f"sample period must be positive, got {self.T}")
        if not 0 < self.omega_wc < 2.0 / self.T:
            raise ValueError(f"crossover must lie in (0, 2/T={2.0 / self.T:g}), got {self.omega_wc}")


@dataclass(frozen=True)
class ControllerDesign:
    method: str
    goal: DesignGoal
    theta_r: float | None
    params: dict
    d_w: TransferFunction
    d_z: TransferFunction
    plant_mag: float
    plant_phase_deg: float
    verification: dict = field(default_factory=dict)


def normalize_angle(deg: float) -> float:
    """Map an angle into (-180, 180]."""
    a = math.fmod(deg, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def _plant_sample(plant: TransferFunction, omega_wc: float) -> tuple[float, float]:
    g = response_at(plant, omega_wc)
    return abs(g), math.degrees(math.atan2(g.imag, g.real))


def _check_plant(plant: TransferFunction, goal: DesignGoal) -> None:
    if plant.domain.kind not in ("Z", "W") or plant.T != goal.T:
        raise ValueError(f"plant domain {plant.domain!r} does not match sample period {goal.T}")


def _loop_check(d_w: TransferFunction, plant: TransferFunction, goal: DesignGoal) -> dict:
    d = complex(d_w(1j * goal.omega_wc))
    g = response_at(plant, goal.omega_wc)
    loop = d * g
    return {
        "loop_magnitude": abs(loop),
        "loop_phase_deg": normalize_angle(math.degrees(math.atan2(loop.imag, loop.real))),
        "target_phase_deg": -180.0 + goal.phi_pm,
        "controller_magnitude": abs(d),
    }


def find_lag_crossover(plant: TransferFunction, phi_pm: float, allowance_deg: float = LAG_ALLOWANCE_DEG) -> float:
    """Frequency where the plant phase equals -(180 - allowance - phi_pm) degrees."""
    target = -180.0 + allowance_deg + phi_pm
    T = plant.T
    hi = 0.999 * 2.0 / T if T else 1e3
    if plant.domain.kind == "Z":
        hi = min(hi, 0.999 * math.pi / T)
    omegas = np.logspace(-3, math.log10(hi), 2000)
    ph = unwrapped_phase(plant, omegas)
    hits = np.nonzero(np.diff(np.sign(ph - target)) != 0)[0]
    if len(hits) == 0:
        raise NoSolution(f"plant phase never reaches {target:g} deg on (1e-3, {hi:g}) rad/s")
    i = hits[0]
    ref = ph[i]

    def f(w):
        d = math.degrees(np.angle(response_at(plant, w))) - ref
        return ref + (d + 180.0) % 360.0 - 180.0 - target

    return brentq(f, omegas[i], omegas[i + 1], xtol=1e-12, rtol=1e-12)


def design_lag(plant: TransferFunction, goal: DesignGoal, a0: float = 10.0) -> ControllerDesign:
    _check_plant(plant, goal)
    mag, phase = _plant_sample(plant, goal.omega_wc)
    w0 = LAG_ZERO_RATIO * goal.omega_wc
    wp = w0 / (a0 * mag)
    if wp >= 2.0 / goal.T:
        raise BandViolation(f"lag pole omega_wp={wp:.6g} falls outside the band 2/T={2.0 / goal.T:g}")
    ctrl = FirstOrderWController(a0, w0, wp, goal.T)
    d_w = ctrl.to_w()
    d_z = realize_first_order(ctrl).normalized()
    return ControllerDesign(
        method="lag",
        goal=goal,
        theta_r=None,
        params={"a0": a0, "omega_w0": w0, "omega_wp": wp},
        d_w=d_w,
        d_z=d_z,
        plant_mag=mag,
        plant_phase_deg=phase,
        verification=_loop_check(d_w, plant, goal),
    )


def design_lead(plant: TransferFunction, goal: DesignGoal, a0: float = 10.0) -> ControllerDesign:
    _check_plant(plant, goal)
    mag, phase = _plant_sample(plant, goal.omega_wc)
    wc, phi = goal.omega_wc, goal.phi_pm
    if not phase < 180.0 + phi:
        raise ConstraintViolated("plant_phase", f"plant phase {phase:.4f} deg is not below {180 + phi:g} deg")
    if not mag < 1.0 / a0:
        raise ConstraintViolated("plant_magnitude", f"|G(j wc)|={mag:.6g} is not below 1/a0={1.0 / a0:.6g}")
    theta_raw = 180.0 + phi - phase
    th = math.radians(normalize_angle(theta_raw))
    c, s = math.cos(th), math.sin(th)
    if not c > a0 * mag:
        raise ConstraintViolated("cos_theta", f"cos(theta_r)={c:.6g} is not above a0*|G|={a0 * mag:.6g}")
    a1 = (1.0 - a0 * mag * c) / (wc * mag * s)
    b1 = (c - a0 * mag) / (wc * s)
    if not b1 > 0:
        raise ConstraintViolated("b1_positive", f"b1={b1:.6g} is not positive")
    w0, wp = a0 / a1, 1.0 / b1
    if not (0 < w0 < 2.0 / goal.T and 0 < wp < 2.0 / goal.T):
        raise BandViolation(f"lead zero {w0:.6g} / pole {wp:.6g} outside (0, 2/T)")
    ctrl = FirstOrderWController(a0, w0, wp, goal.T)
    d_w = TransferFunction(Polynomial([a0, a1]), Polynomial([1.0, b1]), Domain.w(goal.T))
    d_z = realize_first_order(ctrl).normalized()
    ver = _loop_check(d_w, plant, goal)
    if not ver["controller_magnitude"] > a0:
        raise ConstraintViolated("controller_gain", f"|D(j wc)|={ver['controller_magnitude']:.6g} is not above a0={a0:g}")
    return ControllerDesign(
        method="lead",
        goal=goal,
        theta_r=theta_raw,
        params={"a0": a0, "a1": a1, "b1": b1, "omega_w0": w0, "omega_wp": wp, "cos_theta_r": c},
        d_w=d_w,
        d_z=d_z,
        plant_mag=mag,
        plant_phase_deg=phase,
        verification=ver,
    )


def design_pi(plant: TransferFunction, goal: DesignGoal) -> ControllerDesign:
    _check_plant(plant, goal)
    mag, phase = _plant_sample(plant, goal.omega_wc)
    wc, T = goal.omega_wc, goal.T
    theta_raw = -180.0 + goal.phi_pm - phase
    th = math.radians(normalize_angle(theta_raw))
    kp = math.cos(th) / mag
    ki = -wc * math.sin(th) / mag
    if kp <= 0 or ki < 0:
        raise NegativeGain(f"PI gains KP={kp:.6g}, KI={ki:.6g}; choose another crossover frequency")
    # D(w) = (KP w + KI) / w
    d_w = TransferFunction(Polynomial([ki, kp]), Polynomial([0.0, 1.0]), Domain.w(T))
    d_z = bilinear_w_to_z(d_w).normalized()
    return ControllerDesign(
        method="pi",
        goal=goal,
        theta_r=theta_raw,
        params={"KP": kp, "KI": ki, "omega_w0": ki / kp if ki else math.inf},
        d_w=d_w,
        d_z=d_z,
        plant_mag=mag,
        plant_phase_deg=phase,
        verification=_loop_check(d_w, plant, goal),
    )


def pid_w(kp: float, ki: float, kd: float, T: float) -> TransferFunction:
    """KP + KI/w + KD w / (1 + (T/2) w) over the common denominator w (1 + (T/2) w)."""
    h = T / 2.0
    num = Polynomial([ki, kp + ki * h, kp * h + kd])
    den = Polynomial([0.0, 1.0, h])
    return TransferFunction(num, den, Domain.w(T))


def design_pid(plant: TransferFunction, goal: DesignGoal, ki: float = DEFAULT_PID_KI) -> ControllerDesign:
    """PID with a derivative pole at w = -2/T and a caller-fixed integral gain."""
    _check_plant(plant, goal)
    if ki < 0:
        raise NegativeGain(f"integral gain must be non-negative, got {ki}")
    mag, phase = _plant_sample(plant, goal.omega_wc)
    wc, T = goal.omega_wc, goal.T
    g = 2.0 / T
    theta_raw = -180.0 + goal.phi_pm - phase
    th = math.radians(normalize_angle(theta_raw))
    kr = math.cos(th) / mag
    kc = math.sin(th) / mag
    kd = (kc + ki / wc) * (g**2 + wc**2) / (wc * g**2)
    kp = kr - kd * wc**2 * g / (g**2 + wc**2)
    if kp <= 0 or kd < 0:
        raise NegativeGain(f"PID gains KP={kp:.6g}, KD={kd:.6g}; choose another crossover or KI")
    d_w = pid_w(kp, ki, kd, T)
    d_z = bilinear_w_to_z(d_w).normalized()
    return ControllerDesign(
        method="pid",
        goal=goal,
        theta_r=theta_raw,
        params={"KP": kp, "KI": ki, "KD": kd, "KR": kr, "KC": kc},
        d_w=d_w,
        d_z=d_z,
        plant_mag=mag,
        plant_phase_deg=phase,
        verification=_loop_check(d_w, plant, goal),
    )


def design(method: str, plant: TransferFunction, goal: DesignGoal, *, a0: float = 10.0, ki: float = DEFAULT_PID_KI) -> ControllerDesign:
    method = method.lower()
    if method == "lag":
        return design_lag(plant, goal, a0)
    if method == "lead":
        return design_lead(plant, goal, a0)
    if method == "pi":
        return design_pi(plant, goal)
    if method == "pid":
        return design_pid(plant, goal, ki)
    raise ValueError(f"unknown design method {method!r}")
