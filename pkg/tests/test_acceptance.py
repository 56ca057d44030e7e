"""Acceptance criteria, one check per criterion.

Each ``criterion_*`` returns ``(ok, detail)``.  Under pytest the lines are
collected and printed in the terminal summary; run this file directly to get
the same PASS/FAIL lines without pytest.
"""
import filecmp
import json
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from torsion_elastica import cases, cli
from torsion_elastica import surfaces as S
from torsion_elastica.curves import darboux_state, expression_curve, frenet_oracles, reparameterize_arclength
from torsion_elastica.elastic import (
    boundary_residuals,
    corollary_residual,
    el_residual,
    tau_at_end,
    verify_relaxed_elastic,
)
from torsion_elastica.fd import richardson_derivative
from torsion_elastica.jets import Jet
from torsion_elastica.relax import RelaxConfig, discretize, relax
from torsion_elastica.variation import (
    bump_field,
    dlambda_dt,
    first_variation_analytic,
    first_variation_fd,
    make_family,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
CATENOID = "((exp(v)+exp(-v))/2*cos(u), (exp(v)+exp(-v))/2*sin(u), v)"
SEED = 20240601


def _general(patch, u, v, length):
    return reparameterize_arclength(expression_curve(patch, u, v, length, parameter="general"))


def criterion_1():
    """Frenet torsion and curvature agree with the Darboux expressions."""
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst_tau = worst_k2 = 0.0
    for name, i in cases.matrix():
        c = cases.matrix_curve(name, i)
        s = np.sort(rng.uniform(0.0, c.length, 100))
        st = darboux_state(c, s)
        kappa, tau = frenet_oracles(c, s)
        worst_tau = max(worst_tau, float(np.max(np.abs(st.tau[0] - tau) / np.maximum(1.0, np.abs(tau)))))
        worst_k2 = max(worst_k2, float(np.max(np.abs(kappa**2 - (st.kg[0] ** 2 + st.kn[0] ** 2)))))
    dt = time.perf_counter() - t0
    ok = worst_tau <= 1e-8 and worst_k2 <= 1e-10 and dt < 10.0
    return ok, f"max scaled |dtau| = {worst_tau:.2e} (<= 1e-8), max |dkappa2| = {worst_k2:.2e} (<= 1e-10), {dt:.1f} s (< 10 s)"


def _frame(c, s):
    st = darboux_state(c, s)
    return np.stack([st.T, st.Q, st.n])


def criterion_2():
    """Finite-difference derivatives of T, Q, n follow the Darboux frame equations."""
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for name in cases.SURFACES:
        for i in range(3):
            c = cases.matrix_curve(name, i)
            n_st = 17 if i < 2 else 16  # 50 stations per surface
            s = np.sort(rng.uniform(0.05, c.length - 0.05, n_st))
            st = darboux_state(c, s)
            T, Q, n = st.T, st.Q, st.n
            kg, kn, tg = st.kg[0], st.kn[0], st.tg[0]
            rows = np.stack([kg * Q + kn * n, -kg * T + tg * n, -kn * T - tg * Q])
            fd = richardson_derivative(lambda h: _frame(c, s + h), 0.02, levels=4).value
            worst = max(worst, float(np.max(np.abs(fd - rows))))
    return worst <= 1e-6, f"max |FD frame' - Darboux rows| = {worst:.2e} (<= 1e-6) at 50 stations per surface"


def criterion_3():
    """dlambda/dt by finite differences equals int mu kg ds."""
    t0 = time.perf_counter()
    worst = 0.0
    for name, i in cases.matrix():
        c = cases.matrix_curve(name, i)
        for mu in cases.FIELDS:
            fd, formula = dlambda_dt(make_family(c, mu))
            worst = max(worst, abs(float(fd.value) - formula) / max(1.0, abs(formula)))
    dt = time.perf_counter() - t0
    return worst <= 1e-6 and dt < 30.0, f"max scaled error = {worst:.2e} (<= 1e-6) over 36 cases, {dt:.1f} s (< 30 s)"


def criterion_4():
    """FD first variation equals the analytic expression; bump fields recover E(s)."""
    t0 = time.perf_counter()
    worst = 0.0
    for name, i in cases.matrix():
        c = cases.matrix_curve(name, i)
        for mu in cases.FIELDS:
            fam = make_family(c, mu)
            fd = float(first_variation_fd(fam).value)
            total = first_variation_analytic(c, fam.field).total
            worst = max(worst, abs(fd - total) / max(1e-5, 1e-4 * abs(total)))
    c = cases.matrix_curve("torus", 0)
    tau_l = tau_at_end(c)
    half, mass = 0.05, 0.05 * 256 / 315  # integral of the normalized quartic bump
    loc = 0.0
    for frac in (0.2, 0.35, 0.5, 0.65, 0.8):
        s0 = frac * c.length
        fam = make_family(c, bump_field(s0 - half, s0 + half))
        est = float(first_variation_fd(fam).value) / mass
        E0 = float(el_residual(c, s0, tau_l))
        loc = max(loc, abs(est - E0) / abs(E0))
    dt = time.perf_counter() - t0
    ok = worst <= 1.0 and loc <= 1e-4 and dt < 300.0
    return ok, (f"max |fd - analytic| / max(1e-5, 1e-4|total|) = {worst:.2e} (<= 1), "
                f"localization rel. error = {loc:.2e} (<= 1e-4), {dt:.1f} s (< 300 s)")


def planar_curves():
    return {
        "plane circle": expression_curve(S.plane(), "cos(s)", "sin(s)", 2.0),
        "plane parabola": _general(S.plane(), "s", "0.5*s^2", 1.5),
        "plane sine": _general(S.plane(), "s", "0.3*sin(s+0.8)", 2.0),
        "cylinder ellipse": _general(S.cylinder(), "s", "0.5*cos(s)", 2.0),
        "cylinder circle": expression_curve(S.cylinder(), "s", "0.3", 2.0),
    }


def criterion_5():
    """Planar curves are extremals: all residuals vanish and the verdict is true."""
    worst, verdicts = 0.0, []
    for name, c in planar_curves().items():
        r = verify_relaxed_elastic(c)
        worst = max(worst, r.sup_E_normalized, *map(abs, r.B_normalized))
        verdicts.append(r.verdict)
    ok = worst <= 1e-9 and all(verdicts)
    return ok, f"max normalized residual = {worst:.2e} (<= 1e-9), verdicts {sum(verdicts)}/5 true"


def corollary_classes():
    return {
        "geodesic": [
            expression_curve(S.cylinder(), "s/sqrt(2)", "s/sqrt(2)", 4.0),
            expression_curve(S.cylinder(), "s*cos(0.3)", "s*sin(0.3)", 3.0),
            expression_curve(S.sphere(), "pi/2", "s", 2.0),
        ],
        "line_of_curvature": [cases.matrix_curve("sphere", i) for i in range(3)]
        + [expression_curve(S.torus(), "0.7", "s/(2+cos(0.7))", 2.0)],
        "asymptotic": [
            _general(S.from_dsl(CATENOID), "s", "s+0.5", 1.5),
            _general(S.from_dsl(CATENOID), "s", "-1.0-s", 1.5),
        ],
    }


def criterion_6():
    """Specialized equations match the full evaluator; helix residuals."""
    worst = 0.0
    for which, curves in corollary_classes().items():
        for c in curves:
            s = np.linspace(0.0, c.length, 41)
            full = el_residual(c, s, tau_at_end(c))
            spec = corollary_residual(c, which, s)
            worst = max(worst, float(np.max(np.abs(full - spec))) / max(1.0, float(np.max(np.abs(full)))))
    helix = expression_curve(S.cylinder(), "s/sqrt(2)", "s/sqrt(2)", 4.0)
    E = float(np.max(np.abs(el_residual(helix, np.linspace(0, 4, 41), tau_at_end(helix)))))
    B3 = boundary_residuals(helix)[2]
    ok = worst <= 1e-8 and E <= 1e-8 and abs(B3 + 0.25) <= 1e-8
    return ok, f"max scaled corollary mismatch = {worst:.2e} (<= 1e-8); helix sup|E| = {E:.1e}, B3 = {B3:.12f} (-1/4 +- 1e-8)"


def criterion_7():
    """Relaxation of a perturbed circle on the unit sphere."""
    cfg = json.loads((CONFIGS / "sphere_relax.json").read_text())
    patch = S.patch_from_config(cfg["surface"])
    cu = cfg["curve"]
    curve = _general(patch, cu["u"], cu["v"], cu["length"])
    t0 = time.perf_counter()
    res = relax(discretize(curve, 32), RelaxConfig(N=32, max_iters=500, seed=cfg["seed"]))
    dt = time.perf_counter() - t0
    h = np.array(res.history)
    monotone = bool(np.all(h[1:] <= h[:-1] + 1e-12))
    final = reparameterize_arclength(res.curve.to_curve())
    kg1 = float(np.max(np.abs(darboux_state(final, np.linspace(0, final.length, 101)).kg[1])))
    ok = h[-1] <= 1e-6 and monotone and res.iterations <= 500 and res.verdict and kg1 <= 1e-3 and dt < 120.0
    return ok, (f"F: {h[0]:.3e} -> {h[-1]:.2e} (<= 1e-6) in {res.iterations} iterations (<= 500), "
                f"monotone={monotone}, verdict={res.verdict}, sup|kg'| = {kg1:.1e}, {dt:.1f} s (< 120 s)")


def _determinism_configs(tmp):
    relax_cfg = json.loads((CONFIGS / "sphere_relax.json").read_text())
    relax_cfg["relax"] = {"N": 16, "max_iters": 4, "restarts": 1}
    p = Path(tmp) / "relax_short.json"
    p.write_text(json.dumps(relax_cfg))
    return [
        ("invariants", CONFIGS / "torus_matrix.json"),
        ("residual", CONFIGS / "helix.json"),
        ("variation-check", CONFIGS / "torus_matrix.json"),
        ("functional", CONFIGS / "helix.json"),
        ("relax", p),
    ]


def criterion_8():
    """Repeated CLI runs with a fixed seed give byte-identical files."""
    with tempfile.TemporaryDirectory() as tmp:
        diffs, files = [], 0
        for cmd, cfg in _determinism_configs(tmp):
            outs = []
            for k in range(2):
                out = Path(tmp) / f"{cmd}-{k}"
                cli.main([cmd, "--config", str(cfg), "--out", str(out), "--seed", "3"])
                outs.append(out)
            names = sorted(p.name for p in outs[0].iterdir())
            if not names or names != sorted(p.name for p in outs[1].iterdir()):
                diffs.append(cmd)
                continue
            _, mismatch, errors = filecmp.cmpfiles(outs[0], outs[1], names, shallow=False)
            files += len(names)
            if mismatch or errors:
                diffs.append(cmd)
    return not diffs, f"{files} files from 5 commands compared, differing commands: {diffs or 'none'}"


def criterion_9():
    """DSL text of each built-in surface reproduces it in every jet coefficient."""
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for patch, ur in ((S.sphere(), (0.1, 3.0)), (S.cylinder(), (-3.0, 3.0)), (S.torus(), (-3.0, 3.0))):
        other = S.from_dsl(patch.dsl_text())
        u, v = rng.uniform(*ur, 50), rng.uniform(-3.0, 3.0, 50)
        a, b = rng.normal(size=50), rng.normal(size=50)
        t = Jet.variable(np.zeros(50), 7)
        x = S.eval_patch(patch, t * a + u, t * b + v)
        y = S.eval_patch(other, t * a + u, t * b + v)
        worst = max(worst, max(float(np.max(np.abs(p.c - q.c))) for p, q in zip(x, y)))
    return worst <= 1e-13, f"max coefficient difference = {worst:.1e} (<= 1e-13) at 50 points x 3 surfaces"


CRITERIA = {
    1: ("Frenet/Darboux identity", criterion_1),
    2: ("Darboux frame equations", criterion_2),
    3: ("length-derivative identity", criterion_3),
    4: ("first-variation oracle", criterion_4),
    5: ("planar curves are extremals", criterion_5),
    6: ("corollary specializations and helix", criterion_6),
    7: ("sphere relaxation", criterion_7),
    8: ("CLI determinism", criterion_8),
    9: ("DSL round trip", criterion_9),
}


def _record(k):
    title, fn = CRITERIA[k]
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}"
    print(line)
    try:
        from conftest import ACCEPTANCE
        ACCEPTANCE[k] = (ok, title, detail)
    except ImportError:
        pass
    return ok, detail


def test_criterion_1_frenet_darboux_identity():
    ok, detail = _record(1)
    assert ok, detail


def test_criterion_2_frame_equations():
    ok, detail = _record(2)
    assert ok, detail


def test_criterion_3_length_derivative():
    ok, detail = _record(3)
    assert ok, detail


def test_criterion_4_first_variation_oracle():
    ok, detail = _record(4)
    assert ok, detail


def test_criterion_5_planar_extremals():
    ok, detail = _record(5)
    assert ok, detail


def test_criterion_6_corollaries_and_helix():
    ok, detail = _record(6)
    assert ok, detail


def test_criterion_7_sphere_relaxation():
    ok, detail = _record(7)
    assert ok, detail


def test_criterion_8_cli_determinism():
    ok, detail = _record(8)
    assert ok, detail


def test_criterion_9_dsl_round_trip():
    ok, detail = _record(9)
    assert ok, detail


if __name__ == "__main__":
    results = [_record(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
