"""Resistance profiles for the built-in families, printed as a table or CSV."""
import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

from surflab.generators import make_generator
from surflab.type_classifier import classify, resistance_profile


@dataclass
class ProfileConfig:
    family: str
    transform: str = "none"
    radii: list = field(default_factory=lambda: [5, 10, 20, 40])
    exhaustion: str = "auto"
    tol: float = 0.02


DEFAULTS = {
    "z2": ProfileConfig("z2", radii=[8, 16, 32, 64, 128]),
    "z2-t2": ProfileConfig("z2", "t2", radii=[8, 16, 32, 64, 128]),
    "z3": ProfileConfig("z3"),
    "z3-t3": ProfileConfig("z3", "t3"),
    "gm-flute": ProfileConfig("gm-flute", radii=[3, 6, 12, 24]),
    "trivalent": ProfileConfig("trivalent", radii=[3, 6, 12]),
}


def run(cfg: ProfileConfig):
    t0 = time.perf_counter()
    gen = make_generator(cfg.family, cfg.transform)
    prof = resistance_profile(gen, cfg.radii, cfg.exhaustion)
    return prof, classify(prof, cfg.tol), time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=sorted(DEFAULTS), choices=sorted(DEFAULTS))
    ap.add_argument("--csv", help="write name,radius,r_eff rows here")
    args = ap.parse_args(argv)
    rows = []
    for name in args.names:
        prof, verdict, dt = run(DEFAULTS[name])
        print(f"{name:10s} {verdict.verdict:12s} {dt:6.1f} s  "
              + "  ".join(f"R={r}: {v:.6f}" for r, v in prof))
        rows += [(name, r, v) for r, v in prof]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "radius", "r_eff"])
            w.writerows(rows)


if __name__ == "__main__":
    sys.exit(main())
