"""Quadrature error of every foliation piece as the grid doubles.

Prints the error and the observed order log2(e_n / e_2n) per grid size.
"""
import argparse
import math
from dataclasses import dataclass

from surflab.foliation_calc import closed_form, piece, quadrature_dirichlet


@dataclass
class SweepConfig:
    start: int = 16
    doublings: int = 8


PIECES = {
    "rect": piece("rect", a=0, b=2, c=0, d=3),
    "corner": piece("corner", a=0, b=2, c=0, d=1),
    "parallelogram": piece("parallelogram", a=2, b=7, c=3),
    "trapezoid": piece("trapezoid", a=1, a1=2, D=1),
    "trapezoid-steep": piece("trapezoid", a=0.2, a1=3, D=0.5),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=int, default=SweepConfig.start)
    ap.add_argument("--doublings", type=int, default=SweepConfig.doublings)
    cfg = SweepConfig(**vars(ap.parse_args(argv)))
    for name, pc in PIECES.items():
        exact = closed_form(pc)
        print(f"{name}: closed form {exact:.12g}")
        prev = None
        for k in range(cfg.doublings):
            n = cfg.start * 2 ** k
            err = abs(quadrature_dirichlet(pc, n) - exact)
            order = math.log2(prev / err) if prev and err > 0 else float("nan")
            print(f"  n={n:6d}  error {err:.3e}  order {order:5.2f}")
            prev = err


if __name__ == "__main__":
    main()
