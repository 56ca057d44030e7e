import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_elastica import cases
from torsion_elastica import surfaces as S
from torsion_elastica.curves import expression_curve, frame_jets, frenet_oracles, reparameterize_arclength
from torsion_elastica.elastic import (
    Tolerances,
    boundary_residuals,
    classify_curve,
    corollary_boundary,
    corollary_residual,
    el_residual,
    tau_at_end,
    verify_relaxed_elastic,
)
from torsion_elastica.errors import CurvatureDegeneracyError, HypothesisViolation
from torsion_elastica.variation import bump_field, first_variation_analytic, first_variation_fd, make_family

CATENOID = "((exp(v)+exp(-v))/2*cos(u), (exp(v)+exp(-v))/2*sin(u), v)"


@pytest.fixture(scope="module")
def catenoid_asymptotic():
    # u = v + const are asymptotic lines on the catenoid
    return reparameterize_arclength(
        expression_curve(S.from_dsl(CATENOID), "s", "s+0.5", 1.5, parameter="general"))


@pytest.fixture(scope="module")
def parabola():
    return reparameterize_arclength(expression_curve(S.plane(), "s", "0.5*s^2", 1.5, parameter="general"))


class TestPlanar:
    def test_residuals_vanish(self, parabola):
        s = np.linspace(0, parabola.length, 21)
        assert np.max(np.abs(el_residual(parabola, s, tau_at_end(parabola)))) <= 1e-9
        assert max(map(abs, boundary_residuals(parabola))) <= 1e-9
        r = verify_relaxed_elastic(parabola)
        assert r.verdict and r.violated == []
        assert r.classification.planar

    def test_sphere_circle_verdict(self, sphere_circle):
        r = verify_relaxed_elastic(sphere_circle)
        assert r.verdict
        assert r.sup_E_normalized <= 1e-9

    def test_planar_section_of_cylinder(self):
        # the ellipse cut by the plane z = 0.5 x
        c = reparameterize_arclength(expression_curve(S.cylinder(), "s", "0.5*cos(s)", 2.0, parameter="general"))
        assert verify_relaxed_elastic(c).verdict


class TestHelix:
    def test_ode_satisfied_but_b3_fails(self, helix):
        s = np.linspace(0, 4, 21)
        assert np.max(np.abs(el_residual(helix, s, tau_at_end(helix)))) <= 1e-12
        B1, B2, B3 = boundary_residuals(helix)
        assert abs(B1) <= 1e-12 and abs(B2) <= 1e-12
        assert B3 == pytest.approx(-0.25, abs=1e-12)

    def test_b3_against_frenet(self, helix):
        _, tau = frenet_oracles(helix, helix.length)
        kn = float(frame_jets(helix, helix.length, 2).kn.value)
        assert boundary_residuals(helix)[2] == pytest.approx(kn * float(tau), abs=1e-14)

    def test_verdict(self, helix):
        r = verify_relaxed_elastic(helix)
        assert not r.verdict
        assert r.violated == ["B3"]
        assert r.classification.geodesic
        assert r.corollaries["geodesic"]["sup_residual"] <= 1e-12
        assert r.corollaries["geodesic"]["boundary"][0] == pytest.approx(0.5, abs=1e-12)

    def test_report_serializes(self, helix):
        d = verify_relaxed_elastic(helix, stations=11).to_dict()
        assert d["orientation"].startswith("n = +")
        assert d["sup_E"] == max(abs(x) for x in d["E"])
        assert d["classification"]["labels"] == ["geodesic"]


class TestCorollaries:
    def test_great_circle(self, equator):
        s = np.linspace(0, equator.length, 11)
        assert np.max(np.abs(corollary_residual(equator, "geodesic", s))) <= 1e-12
        assert max(map(abs, corollary_boundary(equator, "geodesic"))) <= 1e-12
        assert max(map(abs, boundary_residuals(equator))) <= 1e-12

    def test_plane_line_of_curvature(self, plane_circle):
        s = np.linspace(0, 2, 11)
        assert np.max(np.abs(corollary_residual(plane_circle, "line_of_curvature", s))) <= 1e-12

    def test_hypothesis_violation(self, torus_curve):
        with pytest.raises(HypothesisViolation) as exc:
            corollary_residual(torus_curve, "geodesic", 0.5)
        assert exc.value.sup_norm > 1e-3

    @pytest.mark.parametrize("which,fixture", [
        ("geodesic", "helix"),
        ("line_of_curvature", "sphere_curve"),
        ("asymptotic", "catenoid_asymptotic"),
    ])
    def test_agrees_with_full_evaluator(self, which, fixture, request):
        curve = cases.matrix_curve("sphere", 1) if fixture == "sphere_curve" else request.getfixturevalue(fixture)
        s = np.linspace(0, curve.length, 41)
        full = el_residual(curve, s, tau_at_end(curve))
        spec = corollary_residual(curve, which, s)
        scale = max(1.0, np.max(np.abs(full)))
        assert np.max(np.abs(full - spec)) <= 1e-8 * scale
        assert np.max(np.abs(full)) > 1e-3 or which == "geodesic"


class TestClassification:
    def test_examples(self, helix, torus_curve):
        assert classify_curve(helix).labels() == ["geodesic"]
        for i in range(3):
            assert classify_curve(cases.matrix_curve("sphere", i)).line_of_curvature
        c = classify_curve(torus_curve)
        assert c.generic and c.labels() == ["generic"]

    def test_asymptotic(self, catenoid_asymptotic):
        assert classify_curve(catenoid_asymptotic).asymptotic


class TestVerdict:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-12, 1.0), st.floats(1e-12, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_tightening_never_helps(self, tE, tB, shrinkE, shrinkB):
        curve = cases.matrix_curve("torus", 0)
        loose = verify_relaxed_elastic(curve, Tolerances(tE, tB), stations=11)
        tight = verify_relaxed_elastic(curve, Tolerances(tE * shrinkE, tB * shrinkB), stations=11)
        assert not (tight.verdict and not loose.verdict)

    def test_b3_is_kn_times_tau(self, torus_curve):
        fj = frame_jets(torus_curve, torus_curve.length, 4)
        assert boundary_residuals(torus_curve)[2] == float(fj.kn.value) * float(fj.tau.value)

    def test_degenerate(self):
        with pytest.raises(CurvatureDegeneracyError):
            verify_relaxed_elastic(expression_curve(S.plane(), "s", "0", 1.0))


def test_localization_at_midpoint():
    curve = cases.matrix_curve("torus", 0)
    s0, d = 0.5 * curve.length, 0.05
    fam = make_family(curve, bump_field(s0 - d, s0 + d))
    fd = first_variation_fd(fam).value
    fv = first_variation_analytic(curve, fam.field)
    E0 = el_residual(curve, s0, tau_at_end(curve))
    # int mu ds for the normalized quartic-power bump is d * 256/315
    est = fd / (d * 256 / 315)
    assert abs(fd - fv.total) <= 1e-4 * abs(fv.total)
    assert abs(est - E0) <= 1e-4 * abs(E0)
