"""Command line front end.

Every subcommand prints one JSON report {command, inputs, results, citations}
with sorted keys; exact rationals appear as "num/den" strings.  Exit codes: 0
success, 2 invalid input or missing fixture, 3 internal failure or a failed
verification.
"""

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

import mpmath

from . import __version__
from ._data import fixture_hashes, load_fixture
from .cyclotomic_arithmetic import (
    RealCyclotomicField,
    cyclotomic_poly,
    disc_real_cyclotomic,
    zeta_minus_one,
)
from .errors import FixtureRequiredError, InternalError, ValidationError
from .finite_ring_lab import run_pipeline
from .mass_formula import (
    QuaternionAlgebraSpec,
    ambiguous_class_number,
    class_set_lower_bound,
    eichler_constant,
    field_record,
    mass_class_set,
    numerator_power_of_two_test,
    sfc_degree_obstruction,
)
from .periodic_groups import (
    BinaryPolyhedral,
    QFamily,
    TypeI,
    TypeII,
    classify_type,
    m_H,
    maximal_bpq,
    milgram_nonvanishing,
    parse_group_spec,
    quaternion_quotients_typeI,
    quaternion_quotients_typeII,
    spec_to_dict,
)
from .quaternionic_orders import (
    defect_trivial,
    has_sfc,
    q4n_noncancellation_witness,
)
from .swan_calculus import (
    N_lower_bound,
    SwanClass,
    cancellation_predicate_swan_class,
    fork_cancellation,
    fork_cancellation_mod_action,
    forks_from_pipeline,
    induce_swan,
)

EXIT_OK, EXIT_VALIDATION, EXIT_INTERNAL = 0, 2, 3


# ---------------------------------------------------------------------------
# serialisation

def to_jsonable(obj, approx=False):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        exact = str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
        return {"exact": exact, "approx": float(obj)} if approx else exact
    if isinstance(obj, float):
        return obj
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, 20)
    if isinstance(obj, BinaryPolyhedral):
        return obj.label()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, approx) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        items = [to_jsonable(v, approx) for v in obj]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, approx) for v in obj]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict(), approx)
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj), approx)
    raise InternalError(f"cannot serialise {type(obj).__name__}")


def dumps(report, approx=False):
    return json.dumps(to_jsonable(report, approx), sort_keys=True, indent=2, ensure_ascii=False)


def _text_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _text_lines(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _text_lines(v, f"{prefix}[{i}]")
    else:
        yield f"{prefix:<40} {json.dumps(obj, ensure_ascii=False)}"


def render_text(report, approx=False):
    data = to_jsonable(report, approx)
    lines = [f"# {data['command']}"]
    lines += _text_lines(data["results"], "")
    if data.get("citations"):
        lines.append("citations: " + ", ".join(map(str, data["citations"])))
    return "\n".join(lines)


def make_report(command, inputs, results, citations=()):
    return {"command": command, "inputs": inputs, "results": results, "citations": list(citations)}


# ---------------------------------------------------------------------------
# subcommands

def _ints(text):
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise ValidationError(f"expected comma separated integers, got {text!r}") from None


def cmd_classify(args):
    spec = parse_group_spec(args.group)
    results = {"spec": spec_to_dict(spec), "type": classify_type(spec),
               "mH": m_H(spec), "maximal_bpq": maximal_bpq(spec)}
    return results, ["classification", "quaternionic-multiplicity"]


def cmd_mh(args):
    spec = parse_group_spec(args.group)
    return {"spec": spec_to_dict(spec), "mH": m_H(spec)}, ["quaternionic-multiplicity"]


def cmd_bpq(args):
    spec = parse_group_spec(args.group)
    results = {"spec": spec_to_dict(spec), "type": classify_type(spec), "maximal_bpq": maximal_bpq(spec)}
    if isinstance(spec, TypeI):
        results["quaternion_quotients"] = sorted(quaternion_quotients_typeI(spec))
    elif isinstance(spec, (TypeII, QFamily)):
        results["quaternion_quotients"] = sorted(quaternion_quotients_typeII(spec))
    try:
        holds, reason = milgram_nonvanishing(spec)
        results["milgram"] = {"nonvanishing": holds, "reason": reason}
    except ValidationError:
        pass
    return results, ["binary-polyhedral-quotients"]


def cmd_sfc(args):
    verdict = has_sfc(args.indices)
    results = verdict.as_dict()
    results["defect_trivial"] = defect_trivial(args.indices)
    rules = [step["rule"] for step in verdict.trace]
    return results, [f"sfc-{r}" for r in dict.fromkeys(rules)]


def cmd_witness(args):
    if args.q4n is not None:
        if args.q4n % 4 or args.q4n < 8:
            raise ValidationError(f"--q4n takes the order 4n of Q_4n, got {args.q4n}")
        n = args.q4n // 4
    elif args.n is not None:
        n = args.n
    else:
        raise ValidationError("give --q4n ORDER or --n N")
    spec = q4n_noncancellation_witness(n)
    return {"n": n, "indices": list(spec.indices), "verdict": has_sfc(spec).verdict}, ["sfc-witness"]


def cmd_mass(args):
    K = RealCyclotomicField(args.m)
    ei = eichler_constant(K)
    results = {"m": args.m, "degree": K.degree, "ei": ei, "zeta_minus_one": zeta_minus_one(K)}
    h_K = args.h_k
    norms = tuple(_ints(args.ramified)) if args.ramified is not None else None
    if h_K is None or norms is None:
        try:
            rec = field_record(args.m)
        except FixtureRequiredError:
            rec = {}
        h_K = rec.get("h_K") if h_K is None else h_K
        if norms is None and rec.get("ramified_norms") is not None:
            norms = tuple(rec["ramified_norms"])
    if h_K is not None and norms is not None:
        results["mass"] = mass_class_set(QuaternionAlgebraSpec(args.m, norms), h_K)
    else:
        results["mass"] = None
        results["mass_note"] = "ramification data unknown; pass --ramified and --h-k"
    return results, ["eichler-constant", "mass-formula"]


def cmd_obstruction(args):
    K = RealCyclotomicField(args.m)
    ei = eichler_constant(K)
    degree_ok = sfc_degree_obstruction(K)
    numerator_ok = numerator_power_of_two_test(K)
    results = {
        "m": args.m,
        "degree": K.degree,
        "ei": ei,
        "ei_numerator": ei.numerator,
        "degree_test": degree_ok,
        "numerator_power_of_two": numerator_ok,
        "sfc_excluded": not (degree_ok and numerator_ok),
    }
    return results, ["sfc-degree_bound", "sfc-numerator_test"]


def cmd_zeta(args):
    if args.s != -1:
        raise ValidationError(f"only zeta_K(-1) is available, got s = {args.s}")
    K = RealCyclotomicField(args.m)
    return {"m": args.m, "degree": K.degree, "zeta_minus_one": zeta_minus_one(K),
            "discriminant": disc_real_cyclotomic(K)}, ["dedekind-zeta"]


def cmd_milnor(args):
    report = run_pipeline(args.name)
    return report, [f"milnor-{args.name}"]


def cmd_swan(args):
    base = SwanClass(args.N, 1)
    results = {"N": args.N}
    if args.mul is not None:
        rs = _ints(args.mul)
        prod = base
        for r in rs:
            prod = prod * SwanClass(args.N, r)
        results["factors"] = [SwanClass(args.N, r).r for r in rs]
        results["product"] = prod.r
        results["free"] = prod.is_free
        base = prod
    if args.induce is not None:
        img = induce_swan(base, args.induce)
        results["induced"] = {"M": args.induce, "r": img.r, "free": img.is_free}
    return results, ["swan-module"]


def cmd_cancel(args):
    spec = parse_group_spec(args.group)
    holds, mh, reason = cancellation_predicate_swan_class(spec)
    return {"spec": spec_to_dict(spec), "m_H": mh, "cancellation": holds, "reason": reason}, [
        "cancellation-criterion"]


def cmd_bound(args):
    results = {}
    if args.m is not None:
        results["class_set_bound"] = class_set_lower_bound(args.m)
    if args.mh is not None:
        nb = N_lower_bound(args.mh)
        results["N_lower_bound"] = nb.as_dict()
        results["integer"] = nb.certified_integer()
    if not results:
        raise ValidationError("give --mh M_H and/or --m M")
    if args.figure:
        from .plotting import plot_n_bound

        top = max(60, 2 * (args.mh or 30))
        results["figure"] = plot_n_bound(args.figure, range(3, top + 1, max(1, top // 40)), args.mh)
    return results, ["class-set-bound", "stable-class-bound"]


# ---------------------------------------------------------------------------
# verify-paper

def _anchor_value(check, a, cache):
    if check == "eichler_constant":
        return eichler_constant(a["m"])
    if check == "zeta_minus_one":
        return zeta_minus_one(a["m"])
    if check == "numerator_power_of_two":
        return numerator_power_of_two_test(a["m"])
    if check == "disc_real_cyclotomic":
        return disc_real_cyclotomic(a["m"])
    if check == "cyclotomic_poly":
        return list(cyclotomic_poly(a["n"]))
    if check == "classify":
        return classify_type(parse_group_spec(a["group"]))
    if check == "maximal_bpq":
        return maximal_bpq(parse_group_spec(a["group"]))
    if check == "m_H":
        return m_H(parse_group_spec(a["group"]))
    if check == "milgram":
        return milgram_nonvanishing(parse_group_spec(a["group"]))[0]
    if check == "has_sfc":
        return has_sfc(a["indices"]).verdict
    if check == "witness":
        return list(q4n_noncancellation_witness(a["n"]).indices)
    if check == "defect_trivial":
        return defect_trivial(a["indices"])
    if check == "milnor":
        name = a["name"]
        if name not in cache:
            cache[name] = run_pipeline(name)
        key = a["key"]
        return [cache[name][k] for k in key] if isinstance(key, list) else cache[name][key]
    if check == "cancel":
        return cancellation_predicate_swan_class(parse_group_spec(a["group"]))[0]
    if check == "fork":
        if "q28" not in cache:
            cache["q28"] = run_pipeline("q28")
        fork = forks_from_pipeline(cache["q28"])[a["cls"]]
        return [fork_cancellation(fork), fork_cancellation_mod_action(fork)]
    if check == "ambiguous_class_number":
        return ambiguous_class_number(a["p"])
    raise ValidationError(f"unknown anchor check {check!r}")


def run_anchors(only=None):
    anchors = load_fixture("anchors.json")["anchors"]
    if only:
        sections = set(only)
        known = {a["section"] for a in anchors}
        unknown = sections - known
        if unknown:
            raise ValidationError(f"unknown section(s) {sorted(unknown)}; choose from {sorted(known)}")
        anchors = [a for a in anchors if a["section"] in sections]
    cache, rows = {}, []
    for a in anchors:
        row = {"id": a["id"], "section": a["section"], "expected": a["expected"]}
        try:
            actual = to_jsonable(_anchor_value(a["check"], a["args"], cache))
            row.update(actual=actual, passed=actual == a["expected"])
        except (ValidationError, LookupError, InternalError) as exc:
            row.update(actual=None, passed=False, error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def cmd_verify_paper(args):
    only = [s for part in (args.only or []) for s in part.split(",") if s]
    rows = run_anchors(only)
    failed = [r for r in rows if not r["passed"]]
    results = {
        "anchors": rows,
        "passed": len(rows) - len(failed),
        "failed": len(failed),
        "all_passed": not failed,
        "first_failure": failed[0] if failed else None,
        "fixture_hashes": fixture_hashes(),
        "version": __version__,
    }
    if args.figures:
        from pathlib import Path

        from .plotting import plot_class_set_bound, plot_eichler_constants, plot_n_bound

        d = Path(args.figures)
        ms = [int(m) for m in load_fixture("fields.json")["fields"]]
        results["figures"] = [
            plot_eichler_constants(d / "eichler_constants.png", ms),
            plot_class_set_bound(d / "class_set_bound.png"),
            plot_n_bound(d / "n_bound.png", range(3, 121, 3)),
        ]
    return results, [r["id"] for r in rows]


COMMANDS = {
    "classify": cmd_classify,
    "mh": cmd_mh,
    "bpq": cmd_bpq,
    "sfc": cmd_sfc,
    "witness": cmd_witness,
    "mass": cmd_mass,
    "obstruction": cmd_obstruction,
    "zeta": cmd_zeta,
    "milnor": cmd_milnor,
    "swan": cmd_swan,
    "cancel": cmd_cancel,
    "bound": cmd_bound,
    "verify-paper": cmd_verify_paper,
}


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns the exit code."""

    def error(self, message):
        raise _UsageError(self.format_usage() + f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--text", action="store_true", help="print a flat table instead of JSON")
    common.add_argument("--approx", action="store_true", help="add float approximations to rationals")

    parser = _Parser(prog="quatcancel", description="Cancellation for projective modules over group rings "
                                                    "of periodic groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    for name, help_text in (("classify", "group type, m_H and maximal quotients"),
                            ("mh", "number of quaternionic components m_H"),
                            ("bpq", "maximal binary polyhedral quotients"),
                            ("cancel", "cancellation for the stable class of the finiteness obstruction")):
        add(name, help_text).add_argument("--group", required=True, help="e.g. q28, sl2(7), typeI:m=15,n=4,r=14")

    p = add("sfc", "stably free cancellation for Lambda_S")
    p.add_argument("indices", help="comma separated index set, e.g. 2,14")

    p = add("witness", "an order quotient of Z Q_4n without SFC")
    p.add_argument("--q4n", type=int, help="the group order 4n")
    p.add_argument("--n", type=int)

    p = add("mass", "Eichler constant and class set mass")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--h-k", dest="h_k", type=int, help="class number of the centre")
    p.add_argument("--ramified", help="comma separated residue norms of ramified primes")

    add("obstruction", "degree and numerator tests").add_argument("--m", type=int, required=True)

    p = add("zeta", "zeta_K(-1) for K = Q(zeta_m)^+")
    p.add_argument("s", type=int)
    p.add_argument("--m", type=int, required=True)

    add("milnor", "Milnor square computations").add_argument("name", help="q28, l218 or l1030")

    p = add("swan", "Swan module arithmetic")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mul", help="comma separated residues to multiply")
    p.add_argument("--induce", type=int, metavar="M", help="order of a quotient to induce to")

    p = add("bound", "certified lower bounds for class sets and N(G, n)")
    p.add_argument("--mh", type=int)
    p.add_argument("--m", type=int, help="class set bound for Q(zeta_m)^+")
    p.add_argument("--figure", help="write a plot of the bound to this path")

    p = add("verify-paper", "check every published value")
    p.add_argument("--only", action="append", help="restrict to a section, e.g. milnor")
    p.add_argument("--figures", metavar="DIR", help="also write summary figures to DIR")
    return parser


def run(argv):
    """Parse and dispatch; returns (exit code, report or None, args or None)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        raise _UsageError(parser.format_usage() + "quatcancel: error: a command is required")
    inputs = {k: v for k, v in vars(args).items() if k not in ("command", "text", "approx")}
    results, citations = COMMANDS[args.command](args)
    report = make_report(args.command, inputs, results, citations)
    code = EXIT_OK
    if args.command == "verify-paper" and not results["all_passed"]:
        code = EXIT_INTERNAL
    if args.command == "milnor" and not results.get("ok", True):
        code = EXIT_INTERNAL
    return code, report, args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, report, args = run(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help and --version
        return exc.code or 0
    except (ValidationError, FixtureRequiredError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # never show a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(render_text(report, args.approx) if args.text else dumps(report, args.approx))
    if code == EXIT_INTERNAL and report["command"] == "verify-paper":
        first = report["results"]["first_failure"]
        print(f"verification failed at anchor {first['id']}: expected {first['expected']!r}, "
              f"got {first['actual']!r}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
