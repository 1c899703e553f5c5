import cmath
import math

import numpy as np
import pytest

from digictl.errors import NyquistViolation, PoleHit
from digictl.freqresp import bode_sweep, margins, response_at
from digictl.polytf import Domain, Polynomial, TransferFunction, series
from digictl.xform import bilinear_z_to_w, unwarp_frequency, warp_frequency

T = 0.1


@pytest.fixture(scope="module")
def lag_z():
    return TransferFunction.from_descending([66.15, -64.01], [1.0, -0.7859], Domain.z(T))


def test_response_at_real_pole(plant_s):
    g = response_at(plant_s, 0.7809)
    assert abs(g) == pytest.approx(0.1533 / (0.7809**2 * math.sqrt(2)), rel=1e-12)
    assert abs(g) == pytest.approx(0.1777, abs=1e-4)
    assert math.degrees(cmath.phase(g)) == pytest.approx(-135.0, abs=1e-10)


def test_response_at_unity():
    for dom in (Domain.s(), Domain.z(T), Domain.w(T)):
        assert response_at(TransferFunction.gain(1.0, dom), 1.3) == 1 + 0j


def test_response_at_w_plant_constraint(plant_w):
    g = abs(response_at(plant_w, 2.5))
    assert g == pytest.approx(0.0234, rel=1e-2)
    assert 10 * g < 1


def test_response_errors(plant_z, plant_s):
    with pytest.raises(NyquistViolation):
        response_at(plant_z, math.pi / T)
    with pytest.raises(PoleHit):
        response_at(plant_s, 0.0)


def test_bode_unity():
    pts = bode_sweep(TransferFunction.gain(1.0, Domain.z(T)), 0.01, 10, 50)
    assert len(pts) == 50
    assert all(p.mag_db == 0 and p.phase_deg == 0 for p in pts)


def test_bode_asymptotic_slopes(plant_s):
    pts = bode_sweep(plant_s, 1e-4, 1e3, 141)
    lo = [p for p in pts if p.omega <= 1e-3]
    hi = [p for p in pts if p.omega >= 1e2]
    slope_lo = (lo[-1].mag_db - lo[0].mag_db) / math.log10(lo[-1].omega / lo[0].omega)
    slope_hi = (hi[-1].mag_db - hi[0].mag_db) / math.log10(hi[-1].omega / hi[0].omega)
    assert slope_lo == pytest.approx(-20, abs=0.1)
    assert slope_hi == pytest.approx(-40, abs=0.1)
    assert pts[0].phase_deg == pytest.approx(-90, abs=0.1)


def test_bode_discrete_plant_phase_passes_minus_180(plant_z):
    pts = bode_sweep(plant_z, 0.01, 31, 400)
    phases = np.array([p.phase_deg for p in pts])
    assert phases[0] == pytest.approx(-90, abs=1)
    assert phases[-1] < -180
    assert np.all(np.abs(np.diff(phases)) < 180)


def test_bode_range_errors(plant_z):
    with pytest.raises(NyquistViolation):
        bode_sweep(plant_z, 0.01, 40, 10)
    with pytest.raises(ValueError):
        bode_sweep(plant_z, 1.0, 0.5, 10)


def test_margins_uncompensated(plant_z):
    m = margins(plant_z)
    assert m.phase_margin_deg == pytest.approx(75.7, abs=0.5)
    assert m.gain_margin_db is not None and m.gain_margin_db > 0


def test_margins_published_lag_controller(lag_z, printed_plant):
    m = margins(series(lag_z, printed_plant))
    assert m.phase_margin_deg == pytest.approx(40.0, abs=0.5)
    assert m.gain_margin_db == pytest.approx(14.3, abs=0.3)


def test_margins_pure_gain():
    m = margins(TransferFunction.gain(0.5, Domain.z(T)))
    assert m.gain_crossover is None and m.phase_margin_deg is None
    assert m.gain_margin_db is None


def test_margins_self_consistency(plant_z, lag_z):
    loop = series(lag_z, plant_z)
    m = margins(loop)
    assert abs(response_at(loop, m.gain_crossover)) == pytest.approx(1.0, abs=1e-6)
    ph = math.degrees(cmath.phase(response_at(loop, m.phase_crossover)))
    assert ph == pytest.approx(-180.0, abs=1e-6) or ph == pytest.approx(180.0, abs=1e-6)
    assert m.gain_margin_db == pytest.approx(-20 * math.log10(abs(response_at(loop, m.phase_crossover))), abs=1e-9)


def test_margins_commutative(plant_z, lag_z):
    a = margins(series(lag_z, plant_z))
    b = margins(series(plant_z, lag_z))
    assert a.phase_margin_deg == pytest.approx(b.phase_margin_deg, abs=1e-9)
    assert a.gain_margin_db == pytest.approx(b.gain_margin_db, abs=1e-9)


def test_margins_warp_consistency(plant_z, lag_z):
    loop = series(lag_z, plant_z)
    mz = margins(loop)
    mw = margins(bilinear_z_to_w(loop))
    assert unwarp_frequency(mw.gain_crossover, T) == pytest.approx(mz.gain_crossover, rel=1e-9)
    assert unwarp_frequency(mw.phase_crossover, T) == pytest.approx(mz.phase_crossover, rel=1e-9)
    assert mz.gain_crossover_warped == pytest.approx(warp_frequency(mz.gain_crossover, T))
    assert mw.phase_margin_deg == pytest.approx(mz.phase_margin_deg, abs=1e-7)


def test_conjugate_symmetry(plant_z, plant_s):
    # real coefficients: G(conj x) == conj G(x)
    for tf in (plant_z, plant_s):
        x = cmath.exp(0.37j) if tf.domain.kind == "Z" else 0.37j
        assert tf(x.conjugate()) == pytest.approx(tf(x).conjugate())
    type0 = TransferFunction(Polynomial([1.0]), Polynomial([0.5, 1.0]), Domain.s())
    assert abs(response_at(type0, 1e-9).imag) < 1e-8


def test_type2_loop_phase_anchor(plant_z):
    pi = TransferFunction.from_descending([5.839, -5.823], [1.0, -1.0], Domain.z(T))
    pts = bode_sweep(series(pi, plant_z), 1e-3, 31, 300)
    assert -181 < pts[0].phase_deg < -170
