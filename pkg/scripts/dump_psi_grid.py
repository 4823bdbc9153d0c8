"""Write the tabulated shape functions to CSV (columns z, y, psi1, psi2)."""

import argparse

from nearfield_dephasing.beams import BeamPair, radiation_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output CSV path")
    ap.add_argument("--a-over-L", type=float, default=1e-3, help="separation ratio a / L")
    args = ap.parse_args()
    radiation_spectrum(BeamPair(1.0, 1.0, args.a_over_L)).to_csv(args.out)


if __name__ == "__main__":
    main()
