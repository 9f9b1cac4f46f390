"""Batch front-end: censuses, verification suites, and experiments.

Every subcommand writes its data artifacts (CSV or JSON) plus a manifest
recording the resolved parameters, the package version, and a SHA-256 per
artifact.  Reruns with the same configuration produce byte-identical data
artifacts; only the manifest timestamp differs.  Worker count never changes
any emitted number.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from ._meta import CODE_VERSION
from . import approx_lab, census, spacing, ternary_words
from .cantor_rationals import expansion_of, verify_gcd_identities
from .errors import NotInCantorSet, ResourceCapExceeded
from .ternary_words import Cylinder, DigitWord

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

CACHE_ENV = "CANTORAPPROX_CACHE_DIR"


# ---------------------------------------------------------------------------
# Artifact helpers
# ---------------------------------------------------------------------------

def _render_csv(header: list[str], rows: list[list]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


def _render_json(obj) -> bytes:
    return (json.dumps(obj, indent=1, sort_keys=True) + "\n").encode("utf-8")


def _render_jsonl(objs) -> bytes:
    return "".join(json.dumps(o, sort_keys=True) + "\n" for o in objs).encode("utf-8")


def _frac_obj(x: Fraction | None) -> dict | None:
    if x is None:
        return None
    return {"num": str(x.numerator), "den": str(x.denominator)}


class ArtifactWriter:
    def __init__(self, out_dir: Path, command: str, params: dict):
        self.out_dir = out_dir
        self.command = command
        self.params = params
        self.entries: list[dict] = []

    def write(self, name: str, payload: bytes) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_bytes(payload)
        self.entries.append(
            {
                "name": name,
                "sha256": hashlib.sha256(payload).hexdigest(),
                "bytes": len(payload),
            }
        )
        return path

    def finish(self, status: str = "ok") -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "code_version": CODE_VERSION,
            "artifacts": self.entries,
            "status": status,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        path = self.out_dir / "manifest.json"
        path.write_bytes(_render_json(manifest))
        return path


def _parse_target(value: str) -> DigitWord:
    """A target is a digit string over 0/2 or a fraction p/q (converted via
    its expansion; rejection names the offending digit index)."""
    if "/" in value:
        p_str, q_str = value.split("/", 1)
        e = expansion_of(int(p_str), int(q_str))
        return e.digit_prefix(max(48, 2 * e.level + 8))
    return DigitWord.from_string(value)


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

CENSUS_CSV_HEADER = ["kind", "n", "m_cap", "count", "reference", "ratio_num", "ratio_den", "method"]


def _census_row(rec: census.CensusRecord) -> list:
    norm = rec.normalized
    ref = rec.reference
    return [
        rec.kind,
        rec.n,
        rec.m_cap,
        rec.count,
        None if ref is None else (str(ref) if ref.denominator != 1 else str(ref.numerator)),
        None if norm is None else str(norm.numerator),
        None if norm is None else str(norm.denominator),
        rec.method,
    ]


def _record_json(rec: census.CensusRecord, cache: census.CensusCache | None) -> dict:
    d = rec.to_json_dict()
    if cache is not None:
        cache.put(rec.kind, rec.params_key(), d)
    return d


def cmd_census(args, writer: ArtifactWriter) -> int:
    cache = census.CensusCache(args.cache_dir) if args.cache_dir else None
    records: list[census.CensusRecord] = []
    agreement: dict[str, bool] = {}
    scan_nmax = 0
    q = 1
    while q * 3 <= census.SCAN_QMAX_CAP:
        q *= 3
        scan_nmax += 1
    if args.kind in ("Tn", "all"):
        for n in range(1, args.n_max + 1):
            records.append(census.count_Tn(n, census.METHOD_FORMULA))
            if n <= 16:
                rec = census.count_Tn(n, census.METHOD_ENUM)
                records.append(rec)
                agreement[f"Tn:{n}"] = rec.count == records[-2].count
    if args.kind in ("Nn", "all"):
        for n in range(1, args.n_max + 1):
            rec_e = census.count_Nn(n, census.METHOD_ENUM, args.period_cap)
            records.append(rec_e)
            if n <= scan_nmax:
                rec_s = census.count_Nn(n, census.METHOD_SCAN)
                records.append(rec_s)
                agreement[f"Nn:{n}"] = rec_e.count == rec_s.count
    if args.kind in ("Pm", "all"):
        for m in range(1, args.m_max + 1):
            rec_e = census.count_Pm(m, census.METHOD_ENUM, args.period_cap)
            records.append(rec_e)
            if m <= scan_nmax:
                rec_s = census.count_Pm(m, census.METHOD_SCAN)
                records.append(rec_s)
                agreement[f"Pm:{m}"] = rec_e.count == rec_s.count
    if args.kind in ("A", "all"):
        for n in range(1, min(args.n_max, scan_nmax) + 1):
            for M in args.M:
                records.append(census.count_A(n, Fraction(M), census.METHOD_SCAN))
    if args.format == "csv":
        writer.write("census.csv", _render_csv(CENSUS_CSV_HEADER, [_census_row(r) for r in records]))
    else:
        writer.write("census.jsonl", _render_jsonl([_record_json(r, cache) for r in records]))
    if cache is not None:
        for rec in records:
            cache.put(rec.kind, rec.params_key(), rec.to_json_dict())
    writer.write("agreement.json", _render_json(agreement))
    if not all(agreement.values()):
        return EXIT_VERIFY_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# fn-census
# ---------------------------------------------------------------------------

def cmd_fn_census(args, writer: ArtifactWriter) -> int:
    rows = []
    failures = []
    for n in range(2, args.n_max + 1):
        rec = ternary_words.census_fn(
            n,
            mode=args.mode,
            k=args.k,
            sample_count=args.samples,
            seed=args.seed,
        )
        rows.append(
            [rec.n, rec.k, rec.mode, rec.count, rec.estimate, rec.std_error, rec.total]
        )
        if rec.mode == "exhaustive" and 16 * rec.count < rec.total:
            failures.append({"n": n, "count": rec.count, "bound": rec.total / 16})
    writer.write(
        "fn_census.csv",
        _render_csv(["n", "k", "mode", "count", "estimate", "std_error", "total"], rows),
    )
    if failures:
        writer.write("fn_failures.json", _render_json(failures))
        return EXIT_VERIFY_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _suite_cylinder_gaps(n_max: int) -> dict:
    worst = None
    for n in range(1, min(n_max, 8) + 1):
        cyls = [Cylinder(w) for w in ternary_words.all_words(n)]
        bound = Fraction(1, 3**n)
        for i in range(len(cyls)):
            a_lo, a_hi = cyls[i].interval()
            for j in range(i + 1, len(cyls)):
                b_lo, b_hi = cyls[j].interval()
                gap = max(b_lo - a_hi, a_lo - b_hi)
                if gap < bound:
                    return {"ok": False, "failing": {"n": n, "i": i, "j": j, "gap": str(gap)}}
                rel = gap / bound
                if worst is None or rel < worst:
                    worst = rel
    return {"ok": True, "min_gap_over_bound": str(worst)}


def _suite_measure_additivity(n_max: int) -> dict:
    for n in range(1, min(n_max, 12) + 1):
        total = sum((Cylinder(w).measure for w in ternary_words.all_words(n)), Fraction(0))
        if total != 1:
            return {"ok": False, "failing": {"n": n, "total": str(total)}}
    return {"ok": True, "n_checked": min(n_max, 12)}


def _suite_pair_statistic(n_max: int) -> dict:
    cap = min(n_max, 16)
    for n in range(1, cap + 1):
        for k in range(1, min(n, 6) + 1):
            total = ternary_words.pair_statistic_exhaustive_total(n, k)
            avg = Fraction(total, 2**n)
            if avg != ternary_words.expected_pair_statistic(n, k):
                return {"ok": False, "failing": {"n": n, "k": k, "avg": str(avg)}}
    return {"ok": True, "n_checked": cap}


def _suite_rich_word_bound(n_max: int) -> dict:
    counts = {}
    for n in range(2, n_max + 1):
        rec = ternary_words.census_fn(n)
        counts[n] = rec.count
        if 16 * rec.count < rec.total:
            return {"ok": False, "failing": {"n": n, "count": rec.count}}
    return {"ok": True, "counts": counts}


def _suite_round_trip(level_max: int) -> dict:
    seen = 0
    for r in census.enumerate_expansions(level_max):
        e2 = expansion_of(r.p, r.q)
        if e2 != r.expansion:
            return {"ok": False, "failing": {"p": r.p, "q": r.q}}
        if not verify_gcd_identities(r.expansion):
            return {"ok": False, "failing": {"p": r.p, "q": r.q, "identity": "gcd"}}
        seen += 1
    return {"ok": True, "expansions": seen}


def _suite_bracket_bounds(n_max: int) -> dict:
    scan_nmax = 0
    q = 1
    while q * 3 <= census.SCAN_QMAX_CAP:
        q *= 3
        scan_nmax += 1
    hi = min(n_max, scan_nmax)
    for n in range(1, hi + 1):
        if not census.verify_member_bounds(n):
            return {"ok": False, "failing": {"check": "prelength/period bounds", "n": n}}
        count = census.count_Nn(n, census.METHOD_SCAN).count
        if count != census.count_Nn(n, census.METHOD_ENUM).count:
            return {"ok": False, "failing": {"check": "method agreement", "n": n}}
        if count > census.bracket_inequality_rhs(n):
            return {"ok": False, "failing": {"check": "convolution bound", "n": n}}
    for n in range(1, min(n_max, 6) + 1):
        for M in (1, 2, 3):
            census.count_A(n, M, census.METHOD_SCAN)  # raises on envelope violation
    return {"ok": True, "n_checked": hi}


def _suite_observations(t_max: int, n_max: int) -> dict:
    rep = spacing.verify_observations(t_max, min(n_max, 10))
    if not rep.all_ok:
        bad = [r for r in rep.rows if not r.ok][0]
        return {"ok": False, "failing": {"t": bad.t, "n": bad.n}}
    return {
        "ok": True,
        "rows": len(rep.rows),
        "min_margins": [
            {
                "t": r.t,
                "n": r.n,
                "interfamily": _frac_obj(r.min_interfamily),
                "intrafamily": _frac_obj(r.min_intrafamily),
            }
            for r in rep.rows
        ],
    }


def cmd_verify(args, writer: ArtifactWriter) -> int:
    suites = {
        "cylinder-gaps": lambda: _suite_cylinder_gaps(args.n_max),
        "measure-additivity": lambda: _suite_measure_additivity(args.n_max),
        "pair-statistic-expectation": lambda: _suite_pair_statistic(args.n_max),
        "rich-word-bound": lambda: _suite_rich_word_bound(max(args.n_max, 8)),
        "round-trip-and-gcd": lambda: _suite_round_trip(min(args.n_max + 2, 12)),
        "bracket-bounds": lambda: _suite_bracket_bounds(args.n_max),
        "observations": lambda: _suite_observations(args.t_max, args.n_max),
    }
    report = {}
    ok = True
    for name, fn in suites.items():
        result = fn()
        report[name] = result
        if not result["ok"]:
            ok = False
            print(f"verify: suite {name} FAILED: {result['failing']}", file=sys.stderr)
    writer.write("verify_report.json", _render_json(report))
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# spacing
# ---------------------------------------------------------------------------

def cmd_spacing(args, writer: ArtifactWriter) -> int:
    rep = spacing.verify_observations(args.t_max, args.n_max)
    rows = [
        [
            r.t,
            r.n,
            r.k,
            r.families,
            r.members_total,
            r.duplicates,
            None if r.min_interfamily is None else str(r.min_interfamily.numerator),
            None if r.min_interfamily is None else str(r.min_interfamily.denominator),
            str(r.interfamily_bound.numerator),
            str(r.interfamily_bound.denominator),
            None if r.min_intrafamily is None else str(r.min_intrafamily.numerator),
            None if r.min_intrafamily is None else str(r.min_intrafamily.denominator),
            str(r.intrafamily_bound.numerator),
            str(r.intrafamily_bound.denominator),
            r.max_q_int,
            r.q_int_bound,
            r.ok,
        ]
        for r in rep.rows
    ]
    writer.write(
        "observations.csv",
        _render_csv(
            [
                "t", "n", "k", "families", "members", "duplicates",
                "min_inter_num", "min_inter_den", "inter_bound_num", "inter_bound_den",
                "min_intra_num", "min_intra_den", "intra_bound_num", "intra_bound_den",
                "max_q_int", "q_int_bound", "ok",
            ],
            rows,
        ),
    )
    psi = approx_lab.parse_psi(args.psi)
    base = Cylinder(DigitWord.from_string(args.base))
    ce = spacing.chung_erdos_ratio(psi, base, args.levels, args.depth)
    writer.write(
        "chung_erdos.json",
        _render_json(
            {
                "base": str(base.word),
                "levels": list(ce.levels),
                "depth": ce.depth,
                "psi": psi.describe(),
                "sum_measure": {"lower": _frac_obj(ce.sum_lower), "upper": _frac_obj(ce.sum_upper)},
                "intersection_sum": {
                    "lower": _frac_obj(ce.intersection_lower),
                    "upper": _frac_obj(ce.intersection_upper),
                },
                "ratio": {
                    "lower": _frac_obj(ce.ratio_lower),
                    "upper": _frac_obj(ce.ratio_upper),
                    "unbounded": ce.ratio_upper is None,
                },
                "per_level": [
                    {
                        "n": f.level,
                        "balls": len(f.balls),
                        "generators": f.generators,
                        "radius_exact": _frac_obj(f.radius_exact),
                        "measure": {
                            "lower": _frac_obj(f.measure_lower),
                            "upper": _frac_obj(f.measure_upper),
                        },
                    }
                    for f in ce.families
                ],
            }
        ),
    )
    return EXIT_OK if rep.all_ok else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# khintchine
# ---------------------------------------------------------------------------

def cmd_khintchine(args, writer: ArtifactWriter) -> int:
    psi = approx_lab.parse_psi(args.psi)
    rep = approx_lab.khintchine_experiment(
        psi, args.samples, args.digits, args.n_max, args.seed, jobs=args.jobs
    )
    rows = [
        [r.sample_id, r.decided_full, r.indeterminate, r.max_decided_level]
        for r in rep.rows
    ]
    writer.write(
        "samples.csv",
        _render_csv(["sample_id", "decided_hits", "indeterminate_hits", "max_level"], rows),
    )
    ratio = rep.ratio_to_series
    summary = {
        "psi": rep.psi,
        "samples": rep.samples,
        "digits": rep.digits,
        "n_max": rep.n_max,
        "seed": rep.seed,
        "series": None
        if rep.series is None
        else {
            "N": rep.series.N,
            "lower": _frac_obj(rep.series.lower),
            "upper": _frac_obj(rep.series.upper),
            "exact": _frac_obj(rep.series.exact),
        },
        "mean": None if rep.mean_full is None else float(rep.mean_full),
        "mean_half": None if rep.mean_half is None else float(rep.mean_half),
        "growth": None if rep.growth is None else float(rep.growth),
        "ratio_to_series": None if ratio is None else [float(ratio[0]), float(ratio[1])],
        "regime": rep.regime,
        "hit_model_note": (
            "counts only candidates built from the target's own digit prefix/period; "
            "this undercounts general approximants by boundary cases where a nearby "
            "periodic rational does not share the target's prefix"
        ),
    }
    writer.write("summary.json", _render_json(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# dirichlet
# ---------------------------------------------------------------------------

def cmd_dirichlet(args, writer: ArtifactWriter) -> int:
    q_values = [int(s) for s in args.q_list.split(",")]
    members = tuple(census.enumerate_by_denominator(max(q_values)))
    rows = []
    failures = 0
    indeterminate = 0
    for i in range(args.samples):
        x = approx_lab.sample_point(args.seed, i, args.digits)
        for Q in q_values:
            res = approx_lab.dirichlet_check(x, Q, members=members)
            if res.status == "failure":
                failures += 1
            elif res.status == "indeterminate":
                indeterminate += 1
            rows.append(
                [
                    i,
                    Q,
                    res.status,
                    None if res.witness is None else res.witness.p,
                    None if res.witness is None else res.witness.q,
                    res.candidates_checked,
                ]
            )
    writer.write(
        "dirichlet.csv",
        _render_csv(
            ["sample_id", "Q", "status", "witness_p", "witness_q", "candidates"], rows
        ),
    )
    writer.write(
        "summary.json",
        _render_json(
            {
                "samples": args.samples,
                "digits": args.digits,
                "seed": args.seed,
                "q_values": q_values,
                "failures": failures,
                "indeterminate": indeterminate,
            }
        ),
    )
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# approx
# ---------------------------------------------------------------------------

def cmd_approx(args, writer: ArtifactWriter) -> int:
    try:
        target = _parse_target(args.target)
    except NotInCantorSet as exc:
        print(f"approx: target rejected: {exc}", file=sys.stderr)
        return EXIT_USAGE
    entries = approx_lab.best_approximations(target, args.height_max, top=args.top)
    rows = [
        [
            rank,
            b.rational.p,
            b.rational.q,
            b.rational.q_int,
            str(b.distance_lower.numerator),
            str(b.distance_lower.denominator),
            str(b.distance_upper.numerator),
            str(b.distance_upper.denominator),
            b.successive_minimum,
        ]
        for rank, b in enumerate(entries)
    ]
    writer.write(
        "approx.csv",
        _render_csv(
            [
                "rank", "p", "q", "q_int",
                "dist_lower_num", "dist_lower_den", "dist_upper_num", "dist_upper_den",
                "successive_minimum",
            ],
            rows,
        ),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantorapprox",
        description="Censuses, verification suites, and approximation experiments "
        "for the rational points of the middle-thirds Cantor set.",
    )
    parser.add_argument("--out-dir", default="artifacts", help="artifact directory")
    parser.add_argument(
        "--cache-dir",
        default=os.environ.get(CACHE_ENV),
        help=f"census cache directory (default: ${CACHE_ENV})",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1, help="worker count")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="bracket/level/purely-periodic counting tables")
    p.add_argument("--kind", choices=("Tn", "Nn", "Pm", "A", "all"), default="all")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--M", type=str, nargs="*", default=["1", "2", "3"])
    p.add_argument("--period-cap", type=int, default=census.PERIOD_CAP_DEFAULT)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("fn-census", help="rich-word counts")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="override subword length")
    p.set_defaults(func=cmd_fn_census)

    p = sub.add_parser("verify", help="full invariant and observation suite")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--t-max", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spacing", help="well-spaced families and ratio brackets")
    p.add_argument("--base", type=str, default="", help="base cylinder digits, e.g. 02")
    p.add_argument("--t-max", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--levels", type=int, default=6, help="deepest ball level N")
    p.add_argument("--depth", type=int, default=24, help="measure-cover depth")
    p.add_argument("--psi", type=str, default="constant:1")
    p.set_defaults(func=cmd_spacing)

    p = sub.add_parser("khintchine", help="Monte Carlo dichotomy experiment")
    p.add_argument("--psi", type=str, required=True, help="power-log:s=<decimal> or table:<csv>")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--digits", type=int, default=80)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_khintchine)

    p = sub.add_parser("dirichlet", help="witness sweep for the Dirichlet-type bound")
    p.add_argument("--q-list", type=str, default="9,27,81,243")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--digits", type=int, default=60)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("approx", help="best approximations by intrinsic height")
    p.add_argument("--target", type=str, required=True, help="digit string or p/q")
    p.add_argument("--height-max", type=int, default=729)
    p.add_argument("--top", type=int, default=None)
    p.set_defaults(func=cmd_approx)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {
        k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None
    }
    writer = ArtifactWriter(Path(args.out_dir), args.command, params)
    try:
        code = args.func(args, writer)
    except ResourceCapExceeded as exc:
        print(f"{args.command}: resource cap: {exc}", file=sys.stderr)
        writer.finish(status="resource-cap")
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"{args.command}: invalid parameters: {exc}", file=sys.stderr)
        writer.finish(status="usage-error")
        return EXIT_USAGE
    writer.finish(status="ok" if code == EXIT_OK else "failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
