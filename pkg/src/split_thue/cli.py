"""Command-line entry point: parse family configs, run the verification
pipelines, and emit deterministic machine- and human-readable reports."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from fractions import Fraction

from . import bounds, cubic, solver, units
from .precision import PrecisionBudget, PrecisionExhausted, SplitThueError
from .sequences import FamilyInstance, HypothesisViolated, check_hypotheses, sequence_from_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_BOUND = 3
EXIT_NONTRIVIAL = 4
EXIT_PRECISION = 5


class ConfigError(SplitThueError):
    pass


def load_config(args) -> dict:
    """Read the family config from a path or stdin and fold in CLI flags."""
    if args.config and args.config != "-":
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    else:
        raw = sys.stdin.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}, col {exc.colno}): {exc.msg}") from exc
    for key in ("A", "B"):
        if key not in data:
            raise ConfigError(f"config is missing the '{key}' sequence spec")
    opts = dict(data.get("options", {}))
    defaults = {"n_lo": 1, "n_hi": 10, "y_max": 100, "working_bits": 256, "n_cap": 10**7}
    for key, val in defaults.items():
        opts.setdefault(key, val)
    env_bits = os.environ.get("SPLIT_THUE_BITS")
    if env_bits:
        try:
            opts["working_bits"] = int(env_bits)
        except ValueError as exc:
            raise ConfigError("SPLIT_THUE_BITS must be an integer") from exc
    for flag, key in (
        ("n_lo", "n_lo"), ("n_hi", "n_hi"), ("y_max", "y_max"),
        ("bits", "working_bits"), ("n_cap", "n_cap"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            opts[key] = val
    for key, val in opts.items():
        if not isinstance(val, int) or val <= 0:
            raise ConfigError(f"option {key} must be a positive integer")
    if opts["n_lo"] > opts["n_hi"]:
        raise ConfigError("n_lo must not exceed n_hi")
    data["options"] = opts
    data.setdefault("name", "unnamed-family")
    return data


def build_family(config, args):
    try:
        A = sequence_from_json(config["A"])
        B = sequence_from_json(config["B"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad sequence spec: {exc}") from exc
    budget = PrecisionBudget(working_bits=config["options"]["working_bits"])
    fam = FamilyInstance.build(A, B, budget)
    override = getattr(args, "case_override", None)
    if override:
        fam = dataclasses.replace(fam, equal_modulus=(override == "equal"))
    return fam, budget


def _num(x):
    """JSON-safe number: exact for ints, float elsewhere."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return float(x)
    return float(x)


def _config_echo(config):
    return {"name": config["name"], "options": dict(sorted(config["options"].items()))}


def _solution_row(s):
    return {"x": s.x, "y": s.y, "n": s.n, "sign": s.sign, "class": s.classification}


def cmd_solve(config, args):
    fam, budget = build_family(config, args)
    opts = config["options"]
    report = {"command": "solve", "config": _config_echo(config), "per_n": []}
    code = EXIT_OK
    for n in range(opts["n_lo"], opts["n_hi"] + 1):
        sols = solver.solve_bruteforce(fam, n, opts["y_max"])
        nontrivial = [s for s in sols if s.classification == "nontrivial"]
        if nontrivial:
            code = EXIT_NONTRIVIAL
        report["per_n"].append(
            {
                "n": n,
                "solutions": [_solution_row(s) for s in sols],
                "nontrivial_count": len(nontrivial),
            }
        )
    report["nontrivial_found"] = sum(p["nontrivial_count"] for p in report["per_n"])
    return report, code


def cmd_verify(config, args):
    fam, budget = build_family(config, args)
    opts = config["options"]
    consts = cubic.compute_constants(fam)
    fv = solver.verify_family(fam, opts["n_lo"], opts["n_hi"], opts["y_max"], budget)
    hyp = check_hypotheses(fam, opts["n_hi"], budget)
    per_n = []
    any_out_of_scope = False
    lemma_fail_beyond = False
    code = EXIT_OK
    for rep in fv.per_n:
        row = {
            "n": rep.n,
            "in_scope": rep.in_scope,
            "solutions": [_solution_row(s) for s in rep.solutions],
            "nontrivial": [_solution_row(s) for s in rep.nontrivial],
            "lemma_root_approx": rep.lemma_root_approx,
            "lemma_log_approx": rep.lemma_log_approx,
            "lemma_root_diff": rep.lemma_root_diff,
            "xi_bound_ok": rep.xi_bound_ok,
        }
        if not rep.in_scope:
            any_out_of_scope = True
            row["failures"] = [reason for _, reason in rep.hypothesis_failures]
        per_n.append(row)
    # residual tables over the in-scope range
    residuals = []
    for rep in fv.per_n:
        if not rep.in_scope:
            continue
        try:
            rs = cubic.isolate_roots(fam, rep.n, budget)
        except cubic.AnchorSignFailure:
            continue
        la = cubic.verify_log_approx(rs, fam, consts, budget)
        for e in la.entries:
            residuals.append(
                {"n": rep.n, "name": e.name, "residual": e.residual, "bound": e.bound,
                 "ratio": e.ratio, "ok": e.ok}
            )
    threshold = hyp.first_n_all_pass
    for rep in fv.per_n:
        if threshold is not None and rep.n >= threshold and rep.in_scope:
            if rep.lemma_log_approx is False or rep.lemma_root_diff is False:
                lemma_fail_beyond = True
    if fv.nontrivial_found:
        code = EXIT_NONTRIVIAL
    elif lemma_fail_beyond:
        code = EXIT_BOUND
    elif any_out_of_scope and threshold is None:
        code = EXIT_HYPOTHESIS
    report = {
        "command": "verify",
        "config": _config_echo(config),
        "case": fam.case_tag,
        "hypotheses": {
            "passed": hyp.passed,
            "first_n_all_pass": hyp.first_n_all_pass,
            "bullet": hyp.bullet,
            "equal_case_condition": hyp.equal_case_condition,
        },
        "constants": {
            "C": _num(consts.C),
            "eps": _num(consts.eps),
            "c5": _num(consts.c5),
            "c6": _num(consts.c6),
        },
        "per_n": per_n,
        "residuals": residuals,
        "nontrivial_found": len(fv.nontrivial_found),
        "flags": ["c5-inverted-in-upper-bound", "j3-cB-row-rederived"],
    }
    return report, code


def cmd_bounds(config, args):
    fam, budget = build_family(config, args)
    opts = config["options"]
    consts = cubic.compute_constants(fam)
    res = bounds.compute_n0(fam, consts, n_cap=opts["n_cap"], budget=budget)
    def finite(x):
        # keep the JSON strictly standard: -inf marks "no lower bound yet"
        return x if x == x and abs(x) != float("inf") else None

    trace = [
        {
            "n": r.n,
            "branch": r.branch,
            "R_upper": finite(r.R_upper),
            "logy_upper": finite(r.logy_upper),
            "baker_lower_exponent": finite(r.baker_lower_exponent),
            "xi_upper_log": finite(r.xi_upper_log),
            "verdict": r.verdict,
        }
        for r in res.trace
    ]
    report = {
        "command": "bounds",
        "config": _config_echo(config),
        "case": fam.case_tag,
        "constants": {
            "C": _num(consts.C), "eps": _num(consts.eps),
            "c5": _num(consts.c5), "c6": _num(consts.c6),
        },
        "n0": res.n0,
        "no_crossing": res.no_crossing,
        "n_cap": res.n_cap,
        "branch_thresholds": dict(sorted(res.branch_thresholds.items())),
        "trace": trace,
        "flags": ["c5-inverted-in-upper-bound"],
    }
    if fam.equal_modulus:
        hyp = check_hypotheses(fam, min(opts["n_hi"], 20), budget)
        report["equal_case_condition"] = hyp.equal_case_condition
    code = EXIT_OK if not res.no_crossing else EXIT_BOUND
    return report, code


def to_canonical_json(report) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"), allow_nan=True) + "\n"


def to_markdown(report) -> str:
    out = io.StringIO()
    out.write(f"# split-thue {report['command']} report\n\n")
    out.write(f"- family: **{report['config']['name']}**\n")
    for key, val in report["config"]["options"].items():
        out.write(f"- {key}: {val}\n")
    if "case" in report:
        out.write(f"- case: {report['case']}\n")
    if "constants" in report:
        c = report["constants"]
        out.write(
            f"- constants: C={c['C']:.6g}, eps={c['eps']:.6g}, "
            f"c5={c['c5']:.6g}, c6={c['c6']:.6g}\n"
        )
    if "n0" in report:
        out.write(f"\n## Effective threshold\n\n")
        if report["no_crossing"]:
            out.write(f"No crossing found below the cap {report['n_cap']}.\n")
        else:
            out.write(f"n0 = {report['n0']} (all branches contradict beyond this point).\n")
        for branch, thr in report.get("branch_thresholds", {}).items():
            out.write(f"- {branch}: {thr}\n")
    if "per_n" in report:
        out.write("\n## Per-n results\n\n")
        for row in report["per_n"]:
            nsol = len(row.get("solutions", []))
            nn = row.get("nontrivial_count", len(row.get("nontrivial", [])))
            mark = "NONTRIVIAL" if nn else "ok"
            out.write(f"- n={row['n']}: {nsol} solutions, {mark}\n")
    if report.get("flags"):
        out.write("\n_Caveats: " + ", ".join(report["flags"]) + "_\n")
    return out.getvalue()


def residuals_csv(report) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["n", "name", "residual", "bound", "ratio", "ok"])
    for row in report.get("residuals", []):
        writer.writerow([row["n"], row["name"], row["residual"], row["bound"], row["ratio"], row["ok"]])
    return out.getvalue()


def make_parser():
    parser = argparse.ArgumentParser(
        prog="split-thue",
        description="Verify approximation lemmas, effective bounds and "
        "trivial-only solutions for split families of cubic Thue equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "hypothesis checks, lemma residuals and brute-force solving"),
        ("bounds", "effective bound chain and the threshold n0"),
        ("solve", "brute-force solving only"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", help="family config JSON path (default: stdin)")
        p.add_argument("--n-lo", dest="n_lo", type=int)
        p.add_argument("--n-hi", dest="n_hi", type=int)
        p.add_argument("--y-max", dest="y_max", type=int)
        p.add_argument("--bits", dest="bits", type=int)
        p.add_argument("--n-cap", dest="n_cap", type=int)
        p.add_argument("--json-out", dest="json_out")
        p.add_argument("--md-out", dest="md_out")
        p.add_argument("--csv-out", dest="csv_out")
        p.add_argument(
            "--case-override", dest="case_override", choices=("strict", "equal"),
            help="force the modulus-comparison case split (for testing)",
        )
    return parser


COMMANDS = {"verify": cmd_verify, "bounds": cmd_bounds, "solve": cmd_solve}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        config = load_config(args)
        report, code = COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    payload = to_canonical_json(report)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    if args.md_out:
        with open(args.md_out, "w", encoding="utf-8") as fh:
            fh.write(to_markdown(report))
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8") as fh:
            fh.write(residuals_csv(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
