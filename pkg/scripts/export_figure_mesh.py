"""Export the generalized Scherk surface at t = pi/2 - 0.1 as OBJ for external viewers."""

import argparse
import math

from scherk import weierstrass


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="scherk_t1.4708.obj")
    parser.add_argument("--n", type=int, default=96, help="rings and spokes")
    parser.add_argument("--t-cap", type=float, default=3.0)
    args = parser.parse_args()
    mesh = weierstrass.sample_mesh(0.5 * math.pi - 0.1, args.n, args.n, 0.999, args.t_cap)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(mesh.to_obj())
    print(f"wrote {args.out}: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces, {mesh.clamp_count} clamped")


if __name__ == "__main__":
    main()
