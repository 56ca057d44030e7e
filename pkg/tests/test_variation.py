import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_elastica import surfaces as S
from torsion_elastica.curves import expression_curve, frame_jets, total_square_torsion
from torsion_elastica.errors import EndpointConditionError
from torsion_elastica.fd import richardson_derivative
from torsion_elastica.jets import Jet
from torsion_elastica.variation import (
    VariationFamily,
    beta_jets,
    beta_point,
    dlambda_dt,
    family_length,
    first_variation_analytic,
    first_variation_fd,
    functional_of_family,
    make_family,
    make_variation_field,
    solve_lambda,
)


@pytest.fixture(scope="module")
def line_family():
    # straight line: kappa = 0, so build the family directly (no kappa guard needed for lengths)
    line = expression_curve(S.plane(), "s", "0", 1.0)
    return VariationFamily(line, make_variation_field("s^3", line), eps=0.1)


def point(jv):
    return np.array([float(np.asarray(c.value)) for c in jv])


class TestFields:
    def test_valid(self, equator):
        for spec in ("s^3", "s^3*(l-s)", "sin(s)^3", [0, 0, 0, 1.0], {"poly": [0, 0, 0, 0, 2.0]},
                     {"bump": [0.5, 1.0]}):
            make_variation_field(spec, equator)

    def test_quadratic_rejected(self, equator):
        with pytest.raises(EndpointConditionError) as exc:
            make_variation_field("s^2", equator)
        assert exc.value.failed == ["mu''(0)"]

    def test_reports_every_failure(self, equator):
        with pytest.raises(EndpointConditionError) as exc:
            make_variation_field("1+s", equator)
        assert exc.value.failed == ["mu(0)", "mu'(0)"]

    def test_zero_field_rejected(self, equator):
        with pytest.raises(EndpointConditionError):
            make_variation_field("0*s", equator)

    def test_sin_cubed_jet_at_zero(self, equator):
        fld = make_variation_field("sin(s)^3", equator)
        d = fld.derivs(0.0, 3)
        np.testing.assert_allclose(d, [0, 0, 0, 6], atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.lists(st.floats(-2, 2), min_size=1, max_size=3))
    def test_polynomial_endpoint_rule(self, low, high):
        curve = expression_curve(S.plane(), "cos(s)", "sin(s)", 1.0)
        ok = all(abs(c) <= 1e-12 for c in low) and any(c != 0 for c in low + high)
        if ok:
            make_variation_field(low + high, curve)
        else:
            with pytest.raises(EndpointConditionError):
                make_variation_field(low + high, curve)


class TestFamily:
    def test_t_zero_reproduces_base(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        sig = np.linspace(0, torus_curve.l_star, 25)
        b = beta_jets(fam, sig, 0.0, order=3)
        a = frame_jets(torus_curve, sig, order=3).alpha
        for x, y in zip(b, a):
            np.testing.assert_allclose(x.c, y.c, atol=1e-10)

    def test_initial_point_fixed(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        p0 = point(beta_jets(fam, 0.0, 0.0))
        for t in (-fam.eps / 2, fam.eps / 2):
            b = beta_jets(fam, 0.0, t, order=1)
            np.testing.assert_allclose(point(b), p0, atol=1e-15)
            # initial direction: mu'(0) = 0 keeps beta_sigma(0) = T(0)
            np.testing.assert_allclose(np.array([float(c.c[1]) for c in b]),
                                       point(frame_jets(torus_curve, 0.0, 2).T), atol=1e-15)

    def test_dbeta_dt_is_mu_Q(self, equator):
        fam = make_family(equator, "s^3")
        sig = np.linspace(0.05, equator.length, 20)
        dp = richardson_derivative(lambda t: np.stack([c.value for c in beta_jets(fam, sig, t, 0)]),
                                   1e-3, levels=3).value
        Q = frame_jets(equator, sig, 2).Q.value
        np.testing.assert_allclose(dp, sig**3 * Q, atol=1e-7)
        # at sigma = 1 with t = 1e-3 the point moves
        assert np.linalg.norm(point(beta_jets(fam, 1.0, 1e-3)) - point(beta_jets(fam, 1.0, 0.0))) > 1e-4

    def test_beta_point_composition(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        s = Jet.variable(0.7, 3)
        a = beta_point(fam, 2.0 * s - 0.7, 1e-3)
        b = beta_jets(fam, 0.7, 1e-3, 3)
        for x, y in zip(a, b):
            np.testing.assert_allclose(x.c, y.c * 2.0 ** np.arange(4), atol=1e-13)

    def test_length_at_zero(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        assert family_length(fam, 0.0) == pytest.approx(torus_curve.l_star, abs=1e-12)

    def test_length_condition_on_t_grid(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        half = 0.5 * (torus_curve.length + torus_curve.l_star)
        for t in np.linspace(-fam.eps, fam.eps, 11)[1:-1]:
            assert family_length(fam, t) > half

    def test_straight_line_stretches(self, line_family):
        l_star = line_family.base.l_star
        for t in (-0.05, 0.02, 0.05):
            assert family_length(line_family, t) >= l_star

    def test_lambda(self, line_family, sphere_circle):
        assert solve_lambda(line_family, 0.0) == pytest.approx(1.0, abs=1e-13)
        assert solve_lambda(line_family, 0.03) == pytest.approx(solve_lambda(line_family, -0.03), abs=1e-13)
        fam = make_family(sphere_circle, "s^3")
        lam = solve_lambda(fam, 1e-4)
        assert abs(family_length(fam, 1e-4, lam) - sphere_circle.length) <= 1e-12


class TestLengthDerivative:
    def test_geodesic(self, equator):
        fd, formula = dlambda_dt(make_family(equator, "s^3"))
        assert abs(formula) <= 1e-13
        assert abs(fd.value) <= 1e-7

    def test_plane_circle_closed_form(self):
        r, l = 2.0, 1.5
        c = expression_curve(S.plane(), f"{r}*cos(s/{r})", f"{r}*sin(s/{r})", l)
        fd, formula = dlambda_dt(make_family(c, "s^3"))
        assert formula == pytest.approx(l**4 / (4 * r), rel=1e-13)
        assert abs(fd.value - formula) <= 1e-6 * max(1, abs(formula))

    def test_sphere_small_circle(self, sphere_circle):
        fd, formula = dlambda_dt(make_family(sphere_circle, "s^3"))
        assert abs(fd.value - formula) <= 1e-6 * max(1, abs(formula))


class TestFunctional:
    def test_helix_at_zero(self, helix):
        fam = make_family(helix, "s^3")
        assert functional_of_family(fam, 0.0) == pytest.approx(total_square_torsion(helix).value, abs=1e-9)
        assert functional_of_family(fam, 0.0) == pytest.approx(1.0, abs=1e-9)

    def test_planar_family_stays_planar(self, plane_circle):
        fam = make_family(plane_circle, "s^3")
        for t in (-fam.eps / 2, fam.eps / 3):
            assert abs(functional_of_family(fam, t)) <= 1e-20

    def test_torus_finite(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        vals = [functional_of_family(fam, t) for t in (-1e-3, 1e-3)]
        assert np.all(np.isfinite(vals)) and vals[0] != vals[1]


class TestFirstVariation:
    def test_planar(self, plane_circle):
        fam = make_family(plane_circle, "s^3")
        assert abs(first_variation_fd(fam).value) <= 1e-8
        fv = first_variation_analytic(plane_circle, fam.field)
        for x in (fv.interior, fv.b1_term, fv.b2_term, fv.b3_term, fv.total):
            assert abs(x) <= 1e-10

    def test_helix(self, helix):
        fam = make_family(helix, "s^3")
        fv = first_variation_analytic(helix, fam.field)
        assert abs(fv.interior) <= 1e-10
        assert abs(fv.b3_term) > 1.0
        fd = first_variation_fd(fam)
        assert fd.value != 0
        assert abs(fd.value - fv.total) <= max(1e-5, 1e-4 * abs(fv.total))

    def test_sphere_circle(self, sphere_circle):
        fam = make_family(sphere_circle, "s^3")
        fv = first_variation_analytic(sphere_circle, fam.field)
        fd = first_variation_fd(fam)
        assert abs(fd.value - fv.total) <= max(1e-5, 1e-4 * abs(fv.total))

    def test_clamped_far_end_has_no_boundary_terms(self, torus_curve):
        fld = make_variation_field("s^3*(l-s)^3", torus_curve)
        fv = first_variation_analytic(torus_curve, fld)
        assert fv.b1_term == fv.b2_term == fv.b3_term == 0.0 or max(
            abs(fv.b1_term), abs(fv.b2_term), abs(fv.b3_term)) <= 1e-14
        assert fv.total == pytest.approx(fv.interior, abs=1e-14)

    def test_explicit_steps(self, torus_curve):
        fam = make_family(torus_curve, "s^3")
        fv = first_variation_analytic(torus_curve, fam.field)
        h = fam.eps / 8
        fd = first_variation_fd(fam, steps=[h, h / 2, h / 4, h / 8])
        assert abs(fd.value - fv.total) <= max(1e-5, 1e-4 * abs(fv.total))
