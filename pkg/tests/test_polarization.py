"""Kernel channels, static limits, vacuum pieces, and the screened denominator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad as _scipy_quad

from debye_screen.debye import debye_mass_sq
from debye_screen.errors import (
    InfraredDivergenceError,
    PoleDetectedError,
    ScanError,
)
from debye_screen.polarization import (
    KernelScan,
    ScanPoint,
    b_hat,
    effective_denominator,
    f_hat_spatial,
    f_hat_temporal,
    scan_kernel,
)
from debye_screen.specfun import ThermalParams

UNIT = ThermalParams(beta=1.0, mass=1.0)
# square Debye mass at beta = m = e = 1, frozen from the series route
MD2_UNIT = 0.14379717259228775


def midpoint_kernel_oracle(channel, pt, beta, m, e=1.0, cut=45.0, n_p=3000, n_t=1500):
    """Brute-force midpoint-rule evaluation of the kernel integral.

    Fixed rectangular grid in (p, cos angle), fully vectorized, sharing no
    code with the adaptive path. Positive-definite quotient entries where
    the two mode energies coincide are simply masked out; the grid measure
    of that set vanishes and the midpoint offsets keep it rare.
    """
    p = (np.arange(n_p) + 0.5) * (cut / n_p)
    t = -1.0 + (np.arange(n_t) + 0.5) * (2.0 / n_t)
    pp, tt = np.meshgrid(p, t, indexing="ij")
    wp2 = m * m + pp * pp
    wp = np.sqrt(wp2)
    dot = pt * pp * tt
    wk2 = wp2 + pt * pt + 2.0 * dot
    wk = np.sqrt(wk2)
    e_shared = wp2 + dot
    fp = 1.0 / (1.0 + np.exp(np.minimum(beta * wp, 700.0)))
    fk = 1.0 / (1.0 + np.exp(np.minimum(beta * wk, 700.0)))
    if channel == "temporal":
        num = (wp2 + e_shared) * fp / wp - (wk2 + e_shared) * fk / wk
        sign = 1.0
    else:
        num = (wp2 - e_shared) * fp / wp - (wk2 - e_shared) * fk / wk
        sign = -1.0
    den = wp2 - wk2
    safe = np.abs(den) > 1e-12
    q = np.where(safe, num / np.where(safe, den, 1.0), 0.0)
    total = np.sum(pp * pp * q) * (cut / n_p) * (2.0 / n_t)
    return sign * 2.0 * np.pi * total * e * e / (4.0 * math.pi ** 3)


class TestTemporalKernel:
    def test_zero_momentum_is_minus_square_debye_mass(self):
        got = f_hat_temporal(0.0, UNIT, 1e-10)
        want = -debye_mass_sq(UNIT, 1e-10).m_d_sq
        assert got == pytest.approx(want, rel=1e-12)
        assert got == pytest.approx(-MD2_UNIT, rel=1e-10)

    def test_static_limit_convergence(self):
        # gap to the zero-momentum value shrinks at least linearly
        grid = [0.2, 0.1, 0.05, 0.025]
        gaps = [abs(f_hat_temporal(p, UNIT, 1e-9) + MD2_UNIT) / MD2_UNIT for p in grid]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        orders = [math.log2(a / b) for a, b in zip(gaps, gaps[1:])]
        assert all(o >= 1.0 for o in orders)
        assert gaps[-1] < 1e-4

    def test_matches_fixed_grid_oracle(self):
        got = f_hat_temporal(0.5, UNIT, 1e-8)
        want = midpoint_kernel_oracle("temporal", 0.5, 1.0, 1.0)
        assert got == pytest.approx(want, rel=1e-4)
        assert got == pytest.approx(-0.1415757768, rel=1e-7)

    def test_negative_on_moderate_momenta(self):
        for p in (0.1, 0.7, 1.5):
            assert f_hat_temporal(p, UNIT, 1e-7) < 0.0

    def test_magnitude_decreases_with_momentum(self):
        vals = [abs(f_hat_temporal(p, UNIT, 1e-8)) for p in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_ground_state_vanishes(self):
        cold = ThermalParams(beta=math.inf, mass=1.0)
        assert f_hat_temporal(0.8, cold, 1e-8) == 0.0

    def test_negative_momentum_rejected(self):
        with pytest.raises(ValueError):
            f_hat_temporal(-0.3, UNIT, 1e-8)


class TestSpatialKernel:
    def test_zero_momentum_vanishes(self):
        assert f_hat_spatial(0.0, UNIT, 1e-8) == 0.0

    def test_matches_fixed_grid_oracle(self):
        got = f_hat_spatial(0.5, UNIT, 1e-8)
        want = midpoint_kernel_oracle("spatial", 0.5, 1.0, 1.0)
        assert got == pytest.approx(want, rel=1e-4)
        assert got == pytest.approx(-0.0529450363, rel=1e-7)

    def test_small_relative_to_temperature_scale(self):
        # stays far below e^2/beta^2 across a momentum sweep
        for p in (0.25, 0.5, 1.0):
            assert abs(f_hat_spatial(p, UNIT, 1e-8)) < 0.1

    def test_ground_state_vanishes(self):
        cold = ThermalParams(beta=math.inf, mass=1.0)
        assert f_hat_spatial(1.2, cold, 1e-8) == 0.0


class TestVacuumPiece:
    def test_temporal_contact_term(self):
        # e^2 a1 |pt|^2 and nothing else
        tp = ThermalParams(beta=1.0, mass=1.0, a1=0.5)
        assert b_hat("temporal", 2.0, tp, 1e-10) == pytest.approx(2.0, rel=1e-14)
        tp2 = ThermalParams(beta=3.0, mass=0.2, a1=1.5, charge_e=2.0)
        assert b_hat("temporal", 0.5, tp2, 1e-10) == pytest.approx(1.5, rel=1e-14)

    def test_zero_momentum_vanishes_exactly(self):
        tp = ThermalParams(beta=1.0, mass=1.0, a1=0.7)
        assert b_hat("temporal", 0.0, tp, 1e-10) == 0.0
        assert b_hat("spatial", 0.0, tp, 1e-10) == 0.0

    @pytest.mark.parametrize("pt", [0.5, 2.0])
    def test_spatial_matches_spectral_oracle(self, pt):
        # threshold-form integral over invariant mass squared, independent
        # quadrature machinery
        m = 1.0
        m2, pt2 = m * m, pt * pt
        pref = 16.0 * pt ** 4 / (3.0 * (2.0 * math.pi) ** 5)
        raw = _scipy_quad(
            lambda s: math.sqrt(s - 4 * m2) * (0.5 * m2 + 0.25 * s)
            / (s ** 2.5 * (pt2 + s)),
            4 * m2, math.inf, limit=400, epsabs=0.0, epsrel=1e-13,
        )[0]
        got = b_hat("spatial", pt, UNIT, 1e-12)
        assert got == pytest.approx(0.5 * pref * raw, rel=1e-10)

    def test_spatial_positive_and_growing(self):
        vals = [b_hat("spatial", p, UNIT, 1e-12) for p in (0.5, 1.0, 2.0, 4.0)]
        assert all(v > 0.0 for v in vals)
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_massless_spatial_refused(self):
        with pytest.raises(InfraredDivergenceError):
            b_hat("spatial", 1.0, ThermalParams(beta=1.0, mass=0.0), 1e-10)

    def test_survives_ground_state(self):
        # vacuum pieces carry no temperature dependence
        warm = ThermalParams(beta=1.0, mass=1.0, a1=0.7)
        cold = ThermalParams(beta=math.inf, mass=1.0, a1=0.7)
        for ch in ("temporal", "spatial"):
            assert b_hat(ch, 1.5, cold, 1e-11) == pytest.approx(
                b_hat(ch, 1.5, warm, 1e-11), rel=1e-12)


class TestEffectiveDenominator:
    def test_free_field_reduces_to_momentum_squared(self):
        tp = ThermalParams(beta=1.0, mass=1.0, lam=0.0)
        assert effective_denominator("temporal", 0.7, tp, 1e-10) == pytest.approx(
            0.49, rel=1e-14)

    def test_static_limit_sees_square_debye_mass(self):
        pt = 0.02
        den = effective_denominator("temporal", pt, UNIT, 1e-9)
        assert den == pytest.approx(MD2_UNIT + pt * pt, rel=1e-4)

    def test_positive_for_weak_coupling(self):
        for p in (0.05, 0.3, 0.9, 2.0, 5.0):
            assert effective_denominator("temporal", p, UNIT, 1e-8) > 0.0
            assert effective_denominator("spatial", p, UNIT, 1e-8) > 0.0

    def test_pole_detected_for_strong_contact_term(self):
        # a1 = 2 drags the denominator through zero; bracket the crossing
        # by bisection on the same combination, then demand the guard fires
        tp = ThermalParams(beta=1.0, mass=1.0, a1=2.0)

        def f(p):
            return p * p - (f_hat_temporal(p, tp, 1e-10) + 2.0 * p * p)

        lo, hi = 0.2, 0.6
        flo = f(lo)
        assert flo > 0.0 > f(hi)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if (f(mid) > 0) == (flo > 0):
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        with pytest.raises(PoleDetectedError) as exc:
            effective_denominator("temporal", root, tp, 1e-6)
        assert exc.value.p_tilde == pytest.approx(root)

    def test_nonpositive_momentum_rejected(self):
        with pytest.raises(ValueError):
            effective_denominator("temporal", 0.0, UNIT, 1e-8)


class TestKernelScan:
    def test_points_match_single_evaluations(self):
        grid = [0.0, 0.5, 1.0]
        scan = scan_kernel("temporal", grid, UNIT, 1e-8)
        assert [p.p_tilde_mag for p in scan.points] == grid
        for pt in scan.points:
            assert pt.f_hat == f_hat_temporal(pt.p_tilde_mag, UNIT, 1e-8)
            assert pt.b_hat == b_hat("temporal", pt.p_tilde_mag, UNIT, 1e-8)
            assert pt.denominator == pytest.approx(
                pt.p_tilde_mag ** 2 - UNIT.lam * (pt.f_hat + pt.b_hat), abs=1e-15)
        assert scan.metadata["tol"] == 1e-8
        assert scan.params_snapshot == UNIT

    def test_worker_count_does_not_change_values(self, monkeypatch):
        grid = [0.1, 0.4, 0.8, 1.3]
        monkeypatch.setenv("DEBYE_SCREEN_THREADS", "1")
        serial = scan_kernel("spatial", grid, UNIT, 1e-8)
        monkeypatch.setenv("DEBYE_SCREEN_THREADS", "4")
        threaded = scan_kernel("spatial", grid, UNIT, 1e-8)
        assert serial.points == threaded.points

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValueError):
            scan_kernel("temporal", [0.5, 0.5], UNIT, 1e-8)
        with pytest.raises(ValueError):
            scan_kernel("temporal", [0.5, 0.2], UNIT, 1e-8)
        with pytest.raises(ValueError):
            scan_kernel("temporal", [-0.1, 0.2], UNIT, 1e-8)

    def test_unknown_channel_rejected(self):
        with pytest.raises(ValueError):
            scan_kernel("timelike", [0.1], UNIT, 1e-8)
        with pytest.raises(ValueError):
            KernelScan(channel="timelike", points=(), params_snapshot=UNIT)

    def test_scan_result_ordering_enforced(self):
        bad = (ScanPoint(0.5, 0.0, 0.0, 0.25), ScanPoint(0.2, 0.0, 0.0, 0.04))
        with pytest.raises(ValueError):
            KernelScan(channel="temporal", points=bad, params_snapshot=UNIT)

    def test_abort_carries_partial_points(self, monkeypatch):
        # massless spatial vacuum piece fails at the second grid point;
        # the first completed point must ride along for diagnosis
        monkeypatch.setenv("DEBYE_SCREEN_THREADS", "1")
        massless = ThermalParams(beta=1.0, mass=0.0)
        with pytest.raises(ScanError) as exc:
            scan_kernel("spatial", [0.0, 0.5], massless, 1e-8)
        assert exc.value.partial == (ScanPoint(0.0, 0.0, 0.0, 0.0),)


@settings(max_examples=10, deadline=None)
@given(p=st.floats(min_value=0.05, max_value=3.0))
def test_temporal_denominator_positive_under_unit_coupling(p):
    assert effective_denominator("temporal", p, UNIT, 1e-7) > 0.0
