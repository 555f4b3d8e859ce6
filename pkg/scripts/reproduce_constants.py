"""Print the bound constants and the square-case curvature next to their reference values."""

import math

from scherk import bounds, family, quad

REFERENCE = {
    "finn_osserman": 0.5 * math.pi**2,
    "hall": 5.84865,
    "r_diamond": 0.067344733,
    "g_at_r_diamond": 5.6918,
    "hopf_value": 5.79608,
}


def main():
    rep = bounds.corollary_constants().to_dict()
    for name, ref in REFERENCE.items():
        print(f"{name:16s} {rep[name]:.15g}  (reference {ref}, diff {rep[name] - ref:+.2e})")
    print(f"{'t_critical':16s} {family.t_critical():.15g}")
    print(f"{'kappa(pi/2)^2':16s} {family.kappa(0.5 * math.pi) ** 2:.15g}")
    print(f"{'K at w = 0':16s} {quad.center_curvature(quad.solve_quad(0j)).curvature:.15g}")


if __name__ == "__main__":
    main()
