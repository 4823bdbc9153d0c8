"""Regime map over electron velocity and conductivity, written as CSV."""

import argparse

from nearfield_dephasing.cli import load_config, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="output CSV path (default: stdout)")
    ap.add_argument("--L", type=float, default=10.0, help="loop length, cm")
    ap.add_argument("--points", type=int, default=13, help="points per axis")
    args = ap.parse_args()
    doc = {
        "material": {"kind": "conductor", "sigma": 5e17},
        "beam": {"L": args.L, "a": 1e-2 * args.L},
        "sweep": {"axis": "v", "start": 1e-6, "stop": 0.3, "points": args.points},
        "sweep2": {"axis": "sigma", "start": 1e-2, "stop": 1e6, "points": args.points, "unit": "si"},
    }
    raise SystemExit(run(load_config(doc, "regimes", {"out": args.out})))


if __name__ == "__main__":
    main()
