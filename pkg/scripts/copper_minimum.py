"""Height sweep of K / K0 over copper in the lower part of regime B.

Heights span d_cross / 20 to 10 d_cross; output is the dephase CSV.
"""

import argparse

from nearfield_dephasing.beams import BeamPair
from nearfield_dephasing.cli import load_config, run
from nearfield_dephasing.dephasing import Scenario, crossover_d
from nearfield_dephasing.materials import Conductor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1e-4, help="v / c")
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", help="output CSV path (default: stdout)")
    args = ap.parse_args()
    dx = crossover_d(Scenario(Conductor(5e17), BeamPair.from_velocity(10.0, args.beta, 1e-2)))
    doc = {
        "material": {"kind": "conductor", "sigma": 5e17},
        "beam": {"L": 10.0, "a": 1e-2, "beta": args.beta},
        "methods": ["full", "asymptotic"],
        "sweep": {"axis": "d", "start": dx / 20, "stop": 10 * dx, "points": args.points},
    }
    raise SystemExit(run(load_config(doc, "dephase", {"out": args.out, "threads": args.threads})))


if __name__ == "__main__":
    main()
