"""Recover the Euler-Lagrange density E(s) from first variations along narrow bump fields."""
import argparse
from dataclasses import dataclass, field

import numpy as np

from torsion_elastica import cases
from torsion_elastica.elastic import el_residual, tau_at_end
from torsion_elastica.quadrature import integrate
from torsion_elastica.variation import bump_field, first_variation_fd, make_family


@dataclass
class LocalizationConfig:
    surface: str = "torus"
    curve: int = 0
    half_width: float = 0.05
    fractions: list = field(default_factory=lambda: [0.2, 0.35, 0.5, 0.65, 0.8])


def run(cfg: LocalizationConfig):
    c = cases.matrix_curve(cfg.surface, cfg.curve)
    tau_l = tau_at_end(c)
    print(f"{'s':>8} {'E (evaluator)':>22} {'dF / int mu':>22} {'rel err':>9}")
    out = []
    for frac in cfg.fractions:
        s0 = frac * c.length
        fld = bump_field(s0 - cfg.half_width, s0 + cfg.half_width)
        mass = integrate(fld, s0 - cfg.half_width, s0 + cfg.half_width).value
        est = float(first_variation_fd(make_family(c, fld)).value) / mass
        E0 = float(el_residual(c, s0, tau_l))
        out.append((s0, E0, est))
        print(f"{s0:8.4f} {E0:22.14e} {est:22.14e} {abs(est - E0) / abs(E0):9.2e}")
    return np.array(out)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--surface", default="torus", choices=sorted(cases.SURFACES))
    ap.add_argument("--curve", type=int, default=0)
    ap.add_argument("--half-width", type=float, default=0.05)
    a = ap.parse_args()
    run(LocalizationConfig(a.surface, a.curve, a.half_width))
