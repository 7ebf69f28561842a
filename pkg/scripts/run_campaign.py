"""Run the g1r case campaign and write the certificate report.

Fast mode finishes in minutes; ``--full`` checks every lambda-coefficient of
every subcase and is meant for an overnight run.
"""
import argparse
import json
import os
import sys
import time

from hopfnet.caseprover import CampaignOptions, run_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--l2-zero", action="store_true")
    ap.add_argument("--l4-zero", action="store_true")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--subcases", help="comma separated, default all")
    ap.add_argument("--out", default="campaign_report.json")
    args = ap.parse_args()

    t0 = time.time()

    def progress(msg):
        print(f"[{time.time() - t0:8.1f}s] {msg}", file=sys.stderr, flush=True)

    opts = CampaignOptions("full" if args.full else "fast", args.l2_zero, args.l4_zero, progress=progress)
    if args.subcases:
        opts.subcases = tuple(args.subcases.split(","))
    rep = run_campaign(opts, args.jobs)
    with open(args.out, "w") as fh:
        json.dump(rep.to_json(), fh, indent=2)
    for c in rep.certificates:
        print(f"{c.subcase:6s} {c.verdict:9s} {len(c.obligations):5d} obligations  {c.elapsed:8.1f}s")
    for w in rep.witnesses:
        print(f"nonvanishing {w.to_json()}")
    print(f"verdict {rep.verdict} in {rep.elapsed:.1f}s -> {args.out}")
    return 0 if rep.verdict == "Positive" else 2


if __name__ == "__main__":
    sys.exit(main())
