"""Command line entry point: ``hopfnet <command> ...`` emitting JSON."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    input: str | None
    out: str | None
    seed: int
    precision: int
    mode: str | None = None
    l2_zero: bool = False
    l4_zero: bool = False


def _csv(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number list {text!r}: {exc}") from None


def _network(spec: str):
    from .fixtures import resolve_network

    try:
        return resolve_network(spec)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None


def _motif(net, label: str | None):
    from .netmodel import find_motifs, motif_by_label

    if label is None:
        found = find_motifs(net)
        if not found:
            raise UsageError("network has no motif y <=> Y -> y'")
        return found[0]
    try:
        return motif_by_label(net, label)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _frac(v) -> str:
    return str(Fraction(v))


# ---------------------------------------------------------------- commands

def cmd_parse(args, cfg):
    net = _network(args.network)
    return EXIT_OK, {"network": net.to_json()}


def cmd_rays(args, cfg):
    from .conecalc import extreme_rays, has_zero_row
    from .netmodel import stoichiometric_matrix

    net = _network(args.network)
    E = extreme_rays(stoichiometric_matrix(net))
    doc = E.to_json()
    doc["labels"] = net.labels
    doc["hasZeroRow"] = has_zero_row(E)
    return EXIT_OK, {"extremeMatrix": doc}


def cmd_jacobian(args, cfg):
    from .spectral import convex_model

    model = convex_model(_network(args.network))
    return EXIT_OK, {"variables": model.table.names, "rank": model.rank, "J": model.J.to_json()}


def cmd_charpoly(args, cfg):
    from .spectral import convex_model

    model = convex_model(_network(args.network))
    doc = model.charpoly.to_json()
    doc["variables"] = model.table.names
    doc["termCounts"] = [len(c) for c in model.charpoly.coeffs]
    return EXIT_OK, {"charpoly": doc}


def cmd_hurwitz(args, cfg):
    from .spectral import preclusion_by_positivity

    rep = preclusion_by_positivity(_network(args.network))
    code = EXIT_NEGATIVE if rep.verdict == "Inconclusive" else EXIT_OK
    return code, {"preclusion": rep.to_json()}


def cmd_motifs(args, cfg):
    from .netmodel import check_assumptions, find_motifs

    net = _network(args.network)
    out = []
    for m in find_motifs(net):
        lab = net.labels
        out.append({
            "forward": lab[m.forward],
            "backward": lab[m.backward],
            "product": lab[m.product],
            "intermediate": net.species_names[m.intermediate],
            "assumptions": check_assumptions(net, m).to_json(net),
        })
    return EXIT_OK, {"motifs": out}


def cmd_reduce(args, cfg):
    from .netmodel import check_assumptions, remove_backward
    from .witness import motif_pair

    net = _network(args.network)
    m = _motif(net, args.motif)
    report = check_assumptions(net, m)
    doc = {
        "removed": net.labels[m.backward],
        "reduced": remove_backward(net, m).to_json(),
        "assumptions": report.to_json(net),
    }
    if report.all_pass:
        pair = motif_pair(net, m)
        doc["structureHolds"] = pair.structure_holds()
        if args.check_identity:
            doc["inclusionIdentity"] = pair.inclusion_identity()
    return EXIT_OK, doc


def cmd_prove(args, cfg):
    from .caseprover import CampaignOptions, run_campaign

    if args.network not in ("g1r", "fixtures/g1r.crn"):
        raise UsageError("prove runs the case campaign for g1r only")
    mode = "full" if args.full else "fast"
    subcases = tuple(args.subcases.split(",")) if args.subcases else CampaignOptions.subcases
    progress = (lambda msg: print(msg, file=sys.stderr, flush=True)) if args.verbose else None
    opts = CampaignOptions(mode, args.l2_zero, args.l4_zero, subcases=subcases, progress=progress)
    jobs = args.jobs or os.cpu_count() or 1
    rep = run_campaign(opts, jobs)
    code = EXIT_OK if rep.verdict == "Positive" else EXIT_NEGATIVE
    return code, {"campaign": rep.to_json()}


def cmd_witness_check(args, cfg):
    from .netmodel import stoichiometric_matrix
    from .witness import (
        WitnessPoint,
        mass_action_rhs,
        pure_imaginary_divisor,
        reduced_char_poly_at,
        spectrum,
    )

    net = _network(args.network)
    kappa, x = _csv(args.kappa), _csv(args.x)
    if len(kappa) != net.n_reactions or len(x) != net.n_species:
        raise UsageError(f"need {net.n_reactions} rate constants and {net.n_species} concentrations")
    try:
        w = WitnessPoint(tuple(kappa), tuple(x))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    f = mass_action_rhs(net, kappa, x)
    cp = reduced_char_poly_at(net, kappa, x)
    omega2 = pure_imaginary_divisor(cp)
    rep = spectrum(net, w, tol=args.tol, precision=cfg.precision)
    return EXIT_OK, {
        "steadyState": {"exact": all(v == 0 for v in f), "maxResidual": float(max(abs(v) for v in f))},
        "reducedCharpoly": [_frac(c) for c in cp],
        "exactPureImaginary": None if omega2 is None else {"omegaSquared": _frac(omega2)},
        "spectrum": rep.to_json(),
        "minPairRealPart": rep.min_pair_real_part(),
    }


def cmd_phi(args, cfg):
    from .witness import motif_pair, transport_identities, verify_charpoly_transport
    from .conecalc import extreme_rays
    from .netmodel import stoichiometric_matrix

    net = _network(args.network)
    pair = motif_pair(net, _motif(net, args.motif))
    h, l = _csv(args.h), _csv(args.l)
    if len(h) != net.n_species or len(l) != pair.E.m:
        raise UsageError(f"need {net.n_species} h values and {pair.E.m} l values")
    E = extreme_rays(stoichiometric_matrix(net))
    hp = pair.h_from_original(h)
    lp = pair.l_from_columns(l, E.columns)
    equal, res = verify_charpoly_transport(pair, hp, lp)
    doc = res.to_json()
    if res.ok:
        doc["hPrime"] = pair.h_to_original(doc["hPrime"])
        doc["identities"] = transport_identities(pair, hp, lp, res)
    labels = pair.reduced.labels
    doc["lPrimeColumns"] = [{labels[j]: v for j, v in enumerate(c) if v} for c in pair.E_reduced.columns]
    doc["delta"] = pair.delta
    doc["charpolyEqual"] = equal
    return (EXIT_OK if equal else EXIT_NEGATIVE), {"phi": doc}


def cmd_sample(args, cfg):
    if args.kind == "calcium":
        from .witness import calcium_image_membership

        rep = calcium_image_membership(args.trials, cfg.seed)
        return (EXIT_OK if rep.ok else EXIT_NEGATIVE), {"calciumImage": rep.to_json()}
    from .caseprover import sample_implication

    rep = sample_implication(args.trials, cfg.seed)
    return (EXIT_OK if not rep.violations else EXIT_NEGATIVE), {"implication": rep.to_json()}


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=50, help="significant digits for numerics")

    p = _Parser(prog="hopfnet", description="Hopf bifurcation tools for reaction networks")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def net_cmd(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("network", help="path to a .crn file or a bundled fixture name")
        sp.set_defaults(fn=fn)
        return sp

    net_cmd("parse", cmd_parse, "parse a network and print its structure")
    net_cmd("rays", cmd_rays, "extreme rays of the flux cone")
    net_cmd("jacobian", cmd_jacobian, "symbolic Jacobian in convex parameters")
    net_cmd("charpoly", cmd_charpoly, "reduced characteristic polynomial")
    net_cmd("hurwitz", cmd_hurwitz, "Hurwitz determinants and the positivity test")
    net_cmd("motifs", cmd_motifs, "motifs y <=> Y -> y' and assumptions A1-A5")
    sp = net_cmd("reduce", cmd_reduce, "remove the backward reaction of a motif")
    sp.add_argument("--motif", help="label of a reaction in the motif")
    sp.add_argument("--check-identity", action="store_true", help="also check J'(h,l') = J(h,(l',0))")

    sp = net_cmd("prove", cmd_prove, "case-split positivity campaign (g1r)")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--fast", action="store_true", help="default; Case 1 and 2a in full")
    mode.add_argument("--full", action="store_true", help="every lambda-coefficient of every subcase")
    sp.add_argument("--l2-zero", action="store_true")
    sp.add_argument("--l4-zero", action="store_true")
    sp.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    sp.add_argument("--subcases", help="comma separated subset, e.g. 1a,2a")
    sp.add_argument("--verbose", action="store_true", help="progress on stderr")

    def witness_args(sp, kind):
        sp.add_argument("network")
        if kind == "check":
            sp.add_argument("--kappa", required=True, help="comma separated rate constants")
            sp.add_argument("--x", required=True, help="comma separated concentrations")
            sp.add_argument("--tol", type=float, default=None, help="pure-imaginary tolerance")
            sp.set_defaults(fn=cmd_witness_check)
        else:
            sp.add_argument("--motif", help="label of a reaction in the motif")
            sp.add_argument("--h", required=True, help="comma separated h, original species order")
            sp.add_argument("--l", required=True, help="comma separated l, against the rays printed by `rays`")
            sp.set_defaults(fn=cmd_phi)

    wp = sub.add_parser("witness", help="check witnesses or apply the map phi")
    wsub = wp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    witness_args(wsub.add_parser("check", parents=[common]), "check")
    witness_args(wsub.add_parser("phi", parents=[common]), "phi")
    witness_args(sub.add_parser("phi", parents=[common], help="same as `witness phi`"), "phi")

    sp = sub.add_parser("sample", parents=[common], help="random exact sampling checks")
    sp.add_argument("kind", choices=("implication", "calcium"))
    sp.add_argument("--trials", type=int, default=10_000)
    sp.set_defaults(fn=cmd_sample)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    command = args.command if args.command != "witness" else f"witness {args.action}"
    cfg = RunConfig(command, getattr(args, "network", None), args.out, args.seed, args.precision,
                    "full" if getattr(args, "full", False) else ("fast" if command == "prove" else None),
                    getattr(args, "l2_zero", False), getattr(args, "l4_zero", False))
    t0 = time.perf_counter()
    try:
        code, result = args.fn(args, cfg)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        # malformed networks, failed assumptions and similar input problems
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    doc = {"command": command, "version": __version__, "run": asdict(cfg),
           "elapsedSeconds": round(time.perf_counter() - t0, 3), **result}
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())
