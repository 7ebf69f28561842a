"""Locate the Hopf witness of the fully irreversible processive network and record it.

Writes src/hopfnet/fixtures/irreversible_hopf.json, which the tests read back.
"""
import argparse
import json
from fractions import Fraction
from pathlib import Path

from hopfnet.fixtures import fixture
from hopfnet.witness import search_irreversible_hopf

KAPPA = (1, 1, 3, 40, 1, 50, Fraction(9, 10))  # k1, k3, k4, k6, k7, k8, k10
DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "hopfnet" / "fixtures" / "irreversible_hopf.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--F", default="1/20", help="free enzyme F held fixed during the scan")
    ap.add_argument("--J", default="1", help="cycle flux held fixed during the scan")
    ap.add_argument("--precision", type=int, default=50)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    net = fixture("processive_irreversible")
    res = search_irreversible_hopf(net, KAPPA, Fraction(args.F), Fraction(args.J), precision=args.precision)
    if res is None:
        raise SystemExit("no sign change of det(H5) on the scan grid")
    doc = res.to_json()
    doc["species"] = net.species_names
    doc["labels"] = net.labels
    doc["initialPoint"] = "crossing steady state with x_i scaled by 1 + (-1)^i/20"
    args.out.write_text(json.dumps(doc, indent=2) + "\n")
    cls = doc["spectrum"]["classification"]
    print(f"E* = {doc['free']['E']}, Newton residual {doc['newton']['residual']:.2e}, classification {cls}")


if __name__ == "__main__":
    main()
