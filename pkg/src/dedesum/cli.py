"""Command-line interface: ``dedesum {chars,eval,verify,image,table,scan}``.

Exit codes: 0 success, 1 a verification or conjecture check failed,
2 bad usage or input, 130 interrupted.
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
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import gcd
from pathlib import Path

from .characters import CharacterPair, enumerate_primitive, parse_label, valid_pairs
from .cyclotomic import euler_phi
from .dedekind import EVALUATORS, DedekindContext
from .errors import DedekindError
from .lattice import image_lattice
from .modgroup import SL2Matrix
from .suites import GLOBAL_SUITES, PAIR_SUITES, run_global_suite, run_pair_suite, substream

DEFAULT_CACHE = Path.home() / ".cache" / "dedesum" / "results.jsonl"

# the four reference rows: (q1, order1, q2, order2, image, field)
REFERENCE_TABLE = [
    (3, 2, 7, 2, "2Z", "Q"),
    (5, 2, 8, 2, "2Z", "Q"),
    (5, 2, 7, 3, "2Z[zeta_6]", "Q(zeta_6)"),
    (5, 4, 5, 4, "2Z[zeta_4]", "Q(zeta_4)"),
]
_SHORT_NOTATION = {"2Z[zeta_6]": "2Z[w]", "2Z[zeta_4]": "2Z[i]", "Q(zeta_6)": "Q(w)", "Q(zeta_4)": "Q(i)"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    chi1: str | None = None
    chi2: str | None = None
    q1: tuple[int, int] | None = None
    q2: tuple[int, int] | None = None
    samples: int = 0
    seed: int = 0
    jobs: int = 1
    mode: str = "exact"
    route: str = "auto"
    extra: dict = field(default_factory=dict)

    def fingerprint(self) -> str:
        # jobs, output format and cache location never change results
        data = asdict(self)
        data.pop("jobs")
        blob = json.dumps(data, sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class ResultCache:
    """Append-only JSON-lines store keyed by (command, pair, fingerprint)."""

    def __init__(self, path: Path | None):
        self.path = path
        self.entries: dict = {}
        if path is not None and path.exists():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError:
                        continue  # a torn last line from an interrupted run
                    self.entries[(rec["command"], rec["pair"], rec["fingerprint"])] = rec

    def get(self, command: str, pair: str, fingerprint: str):
        if self.path is None:
            return None
        rec = self.entries.get((command, pair, fingerprint))
        return None if rec is None else rec["payload"]

    def put(self, command: str, pair: str, fingerprint: str, payload, passed: bool) -> None:
        if self.path is None:
            return
        rec = {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "fingerprint": fingerprint,
            "pair": pair,
            "command": command,
            "payload": payload,
            "pass": passed,
        }
        self.entries[(command, pair, fingerprint)] = rec
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()


# parsing helpers


def parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A..B or A") from None


def parse_orders(text: str | None) -> tuple[int | None, int | None]:
    if not text:
        return (None, None)
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise UsageError("--orders takes 'o1,o2'")
    return tuple(None if p in ("", "*") else int(p) for p in parts)


def _open_cache(args) -> ResultCache:
    if getattr(args, "no_cache", False):
        return ResultCache(None)
    path = args.cache or os.environ.get("DEDESUM_CACHE") or DEFAULT_CACHE
    return ResultCache(Path(path))


def _pair_from_args(args) -> CharacterPair:
    if not args.chi1 or not args.chi2:
        raise UsageError("--chi1 and --chi2 are required")
    return CharacterPair(parse_label(args.chi1), parse_label(args.chi2))


def _pairs_from_args(args) -> list[CharacterPair]:
    if args.chi1 or args.chi2:
        return [_pair_from_args(args)]
    if not args.q1 or not args.q2:
        raise UsageError("give --chi1/--chi2 or --q1/--q2 ranges")
    lo1, hi1 = parse_range(args.q1)
    lo2, hi2 = parse_range(args.q2)
    orders = parse_orders(getattr(args, "orders", None))
    pairs = []
    for q1 in range(lo1, hi1 + 1):
        for q2 in range(lo2, hi2 + 1):
            pairs.extend(valid_pairs(q1, q2, orders))
    return pairs


def _emit(obj, args, human: str) -> None:
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        sys.stdout.write(human)


def _approx(z: complex) -> str:
    if abs(z.imag) < 5e-13:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


# commands


def cmd_chars(args) -> int:
    q = args.q
    if q < 3:
        raise UsageError(f"no nontrivial primitive characters modulo {q}")
    rows = []
    for chi in enumerate_primitive(q):
        if chi.is_trivial:
            continue
        rows.append({
            "label": chi.label,
            "exponents": chi.vector_label,
            "order": chi.order,
            "parity": "even" if chi.is_even else "odd",
            "conductor": chi.conductor,
        })
    lines = [f"{'label':<10} {'exponents':<16} {'order':>5}  {'parity':<6} {'conductor':>9}"]
    for r in rows:
        lines.append(f"{r['label']:<10} {r['exponents']:<16} {r['order']:>5}  {r['parity']:<6} {r['conductor']:>9}")
    _emit(rows, args, "\n".join(lines) + "\n")
    return 0


def cmd_eval(args) -> int:
    pair = _pair_from_args(args)
    ctx = DedekindContext(pair, evaluator=args.formula, paranoid=args.paranoid)
    if args.matrix:
        g = SL2Matrix.parse(args.matrix)
        value = ctx.eval(g)
        a, c = g.a, g.c
    elif args.ac:
        a, c = args.ac
        value = ctx.eval_ac(a, c)
    else:
        raise UsageError("give --ac A C or --matrix a,b,c,d")
    out = {
        "pair": pair.label,
        "a": a,
        "c": c,
        "formula": args.formula,
        "value": value.to_text(),
        "approx": _approx(value.to_complex()),
    }
    human = (
        f"S_{{{pair.chi1.label},{pair.chi2.label}}}(a={a}, c={c}) = {value}\n"
        f"  exact:  {value.to_text()}\n  approx: {out['approx']}\n"
    )
    _emit(out, args, human)
    return 0


def _verify_task(task):
    kind, name, labels, seed, samples, paranoid = task
    if kind == "global":
        return run_global_suite(name, seed, samples).to_json()
    pair = CharacterPair(parse_label(labels[0]), parse_label(labels[1]))
    return run_pair_suite(name, DedekindContext(pair, paranoid=paranoid), seed, samples).to_json()


def _run_tasks(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def cmd_verify(args) -> int:
    names = [s.strip() for s in args.suite.split(",")] if args.suite else list(PAIR_SUITES) + list(GLOBAL_SUITES)
    unknown = [n for n in names if n not in PAIR_SUITES and n not in GLOBAL_SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; known: {sorted(PAIR_SUITES) + sorted(GLOBAL_SUITES)}")
    tasks = [("global", n, None, args.seed, max(args.samples, 1) * 10, False) for n in names if n in GLOBAL_SUITES]
    pair_names = [n for n in names if n in PAIR_SUITES]
    if pair_names:
        pairs = _pairs_from_args(args)
        for p in pairs:
            for n in pair_names:
                tasks.append(("pair", n, (p.chi1.label, p.chi2.label), args.seed, args.samples, args.paranoid))
    results = _run_tasks(_verify_task, tasks, args.jobs)
    ok = all(r["passed"] for r in results)
    lines = []
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        where = r["pair"] or "-"
        extra = ""
        if "info" in r:
            extra = "  " + " ".join(f"{k}={v}" for k, v in r["info"].items())
        lines.append(f"{status} {r['suite']:<14} {where:<16} {r['checks'] - r['failures']}/{r['checks']}{extra}")
        for msg in r.get("messages", []):
            lines.append(f"     {msg}")
    lines.append(f"{sum(r['passed'] for r in results)}/{len(results)} suites passed")
    _emit({"command": "verify", "seed": args.seed, "results": results, "passed": ok}, args, "\n".join(lines) + "\n")
    return 0 if ok else 1


def _image_task(task):
    labels, mode, route, samples, seed, max_c, max_r, timings, paranoid, jobs = task
    pair = CharacterPair(parse_label(labels[0]), parse_label(labels[1]))
    ctx = DedekindContext(pair, paranoid=paranoid)
    rng = substream(seed, "image", pair.label) if mode == "sampled" else None
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rep = image_lattice(ctx, mode=mode, route=route, sample_budget=samples, rng=rng, max_c=max_c,
                                max_r=max_r, jobs=jobs, mapper=pool.map)
    else:
        rep = image_lattice(ctx, mode=mode, route=route, sample_budget=samples, rng=rng, max_c=max_c,
                            max_r=max_r)
    return rep.to_json(timings=timings)


def _conjecture_applies(report: dict) -> bool:
    # F quadratic characters -> Q, or F a quadratic field: phi(m) <= 2
    return euler_phi(report["m"]) <= 2


def _report_ok(report: dict) -> bool:
    v = report["verdicts"]
    if not v["thm16"]:
        return False
    if gcd(report["q1"], report["q2"]) == 1 and not v["integral"]:
        return False
    if report["mode"] == "exact" and not v["full_rank"]:
        return False
    return True


def _images(pairs, args, command):
    cache = _open_cache(args)
    cfg = RunConfig(command, mode=args.mode, route=args.route, samples=args.samples, seed=args.seed,
                    extra={"max_c": args.max_c, "max_r": args.max_r, "timings": args.timings, "paranoid": args.paranoid})
    fp = cfg.fingerprint()
    results: list = [None] * len(pairs)
    todo = []
    for i, p in enumerate(pairs):
        hit = None if args.no_cache else cache.get(command, p.label, fp)
        if hit is not None:
            results[i] = dict(hit, cached=True)
        else:
            todo.append(i)
    # a lone pair parallelises over generators instead of over pairs
    inner = args.jobs if len(todo) == 1 else 1
    tasks = [((pairs[i].chi1.label, pairs[i].chi2.label), args.mode, args.route, args.samples, args.seed,
              args.max_c, args.max_r, args.timings, args.paranoid, inner) for i in todo]
    if args.jobs <= 1 or len(tasks) <= 1:
        for i, t in zip(todo, tasks):
            results[i] = _image_task(t)
            cache.put(command, pairs[i].label, fp, results[i], _report_ok(results[i]))
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for i, rep in zip(todo, pool.map(_image_task, tasks)):
                results[i] = rep
                cache.put(command, pairs[i].label, fp, rep, _report_ok(rep))
    return results


def _image_lines(rep: dict) -> list[str]:
    v = rep["verdicts"]
    lines = [
        f"{rep['pair']}: image {rep['image']}  (rank {rep['rank']}, phi(m) = {euler_phi(rep['m'])}, "
        f"{rep['mode']}/{rep['route']}, {rep['generators']} generators){'  [cached]' if rep.get('cached') else ''}",
        f"  basis (1/{rep['D']}): {rep['basis']}",
        f"  = 2Z[zeta_m]: {v['two_conj']}   in (1/gcd)Z[zeta_m]: {v['thm16']}   "
        f"integral: {v['integral']}   full rank: {v['full_rank']}",
    ]
    cost = rep.get("cost")
    if cost:
        lines.append(f"  cost: {cost['sums']} sums, max c = {cost['max_c']}, total c = {cost['total_c']}")
    if rep.get("caveat"):
        lines.append(f"  caveat: {rep['caveat']}")
    return lines


def cmd_image(args) -> int:
    pairs = _pairs_from_args(args)
    if not pairs:
        raise UsageError("no valid character pairs for that input")
    reports = _images(pairs, args, "image")
    ok = all(_report_ok(r) for r in reports)
    lines = [line for r in reports for line in _image_lines(r)]
    _emit({"command": "image", "reports": reports, "passed": ok}, args, "\n".join(lines) + "\n")
    return 0 if ok else 1


def table_rows(args) -> list[dict]:
    rows = []
    for q1, o1, q2, o2, expected, fld in REFERENCE_TABLE:
        pairs = valid_pairs(q1, q2, (o1, o2))
        reports = _images(pairs, args, "table")
        images = sorted({r["image"] for r in reports})
        fields = sorted({"Q" if r["m"] <= 2 else f"Q(zeta_{r['m']})" for r in reports})
        match = images == [expected] and fields == [fld]
        rows.append({
            "q1": q1, "order1": o1, "q2": q2, "order2": o2,
            "pairs": [r["pair"] for r in reports],
            "image": images[0] if len(images) == 1 else images,
            "field": fields[0] if len(fields) == 1 else fields,
            "rank": sorted({r["rank"] for r in reports}),
            "expected": expected,
            "match": match,
            "full_rank": all(r["verdicts"]["full_rank"] for r in reports),
        })
    return rows


def render_table(rows: list[dict]) -> str:
    out = io.StringIO()
    out.write("| chi1: q1, order | chi2: q2, order | pairs | image | F | expected | match |\n")
    out.write("|---|---|---|---|---|---|---|\n")
    for r in rows:
        img = r["image"] if isinstance(r["image"], str) else " / ".join(r["image"])
        fld = r["field"] if isinstance(r["field"], str) else " / ".join(r["field"])
        shown = f"{img} = {_SHORT_NOTATION[img]}" if img in _SHORT_NOTATION else img
        fshown = f"{fld} = {_SHORT_NOTATION[fld]}" if fld in _SHORT_NOTATION else fld
        out.write(
            f"| {r['q1']}, {r['order1']} | {r['q2']}, {r['order2']} | {', '.join(r['pairs'])} | "
            f"{shown} | {fshown} | {r['expected']} | {'yes' if r['match'] else 'NO'} |\n"
        )
    return out.getvalue()


def cmd_table(args) -> int:
    args.mode = "exact"
    rows = table_rows(args)
    ok = all(r["match"] and r["full_rank"] for r in rows)
    text = render_table(rows)
    if args.golden:
        golden = Path(args.golden).read_text(encoding="utf-8")
        if golden != text:
            sys.stderr.write("table differs from golden file\n")
            ok = False
    _emit({"command": "table", "rows": rows, "passed": ok}, args,
          text + f"\n{sum(r['match'] for r in rows)}/{len(rows)} rows reproduced\n")
    return 0 if ok else 1


def scan_pairs(q1r, q2r, quadratic_only=False, coprime_only=False, odd_only=False, max_level=None):
    pairs = []
    orders = (2, 2) if quadratic_only else (None, None)
    for q1 in range(q1r[0], q1r[1] + 1):
        for q2 in range(q2r[0], q2r[1] + 1):
            if coprime_only and gcd(q1, q2) != 1:
                continue
            if odd_only and (q1 % 2 == 0 or q2 % 2 == 0):
                continue
            if max_level is not None and q1 * q2 > max_level:
                continue
            pairs.extend(valid_pairs(q1, q2, orders))
    return pairs


def cmd_scan(args) -> int:
    if not args.q1 or not args.q2:
        raise UsageError("scan needs --q1 and --q2 ranges")
    pairs = scan_pairs(parse_range(args.q1), parse_range(args.q2), args.quadratic_only,
                       args.coprime_only, args.odd_only, args.max_level)
    reports = _images(pairs, args, "scan") if pairs else []
    rows = []
    for r in reports:
        applies = _conjecture_applies(r)
        rows.append({
            "pair": r["pair"], "q1": r["q1"], "q2": r["q2"], "orders": r["orders"],
            "image": r["image"], "rank": r["rank"],
            "two_conj": r["verdicts"]["two_conj"],
            "conjecture_applies": applies,
            "thm16": r["verdicts"]["thm16"],
            "integral": r["verdicts"]["integral"],
            "full_rank": r["verdicts"]["full_rank"],
            "theorems_ok": _report_ok(r),
        })
    theorem_failures = [row["pair"] for row in rows if not row["theorems_ok"]]
    # a sampled image is only a lower bound, so it cannot refute the conjecture
    counterexamples = [row["pair"] for row in rows
                       if row["conjecture_applies"] and not row["two_conj"] and args.mode == "exact"]
    summary = {
        "pairs": len(rows),
        "two_conj_holds": sum(row["two_conj"] for row in rows),
        "conjecture_applies": sum(row["conjecture_applies"] for row in rows),
        "counterexamples": counterexamples,
        "theorem_failures": theorem_failures,
    }
    ok = not theorem_failures and not counterexamples
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["pair", "q1", "q2", "orders", "image", "rank", "two_conj", "conjecture_applies",
                "thm16", "integral", "full_rank", "theorems_ok"]
        w.writerow(cols)
        for row in rows:
            w.writerow([("/".join(map(str, row[c])) if c == "orders" else row[c]) for c in cols])
        sys.stdout.write(buf.getvalue())
        return 0 if ok else 1
    lines = [f"{'pair':<18} {'image':<16} {'rank':>4}  =2Z[z]  thm  integral"]
    for row in rows:
        lines.append(f"{row['pair']:<18} {row['image']:<16} {row['rank']:>4}  {str(row['two_conj']):<6}  "
                     f"{'ok' if row['theorems_ok'] else 'FAIL':<4} {row['integral']}")
    lines.append(f"{summary['pairs']} pairs; image = 2Z[zeta_m] for {summary['two_conj_holds']}; "
                 f"counterexamples: {counterexamples or 'none'}; theorem failures: {theorem_failures or 'none'}")
    _emit({"command": "scan", "rows": rows, "summary": summary, "passed": ok}, args, "\n".join(lines) + "\n")
    return 0 if ok else 1


# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomised step (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    pairsel = argparse.ArgumentParser(add_help=False)
    pairsel.add_argument("--chi1", help="first character, 'q.n' or 'q:[e1,...]'")
    pairsel.add_argument("--chi2", help="second character")

    ranges = argparse.ArgumentParser(add_help=False)
    ranges.add_argument("--q1", help="conductor range A..B")
    ranges.add_argument("--q2", help="conductor range A..B")
    ranges.add_argument("--orders", help="restrict character orders, e.g. '2,2'")

    imaging = argparse.ArgumentParser(add_help=False)
    imaging.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    imaging.add_argument("--route", choices=("auto", "schreier", "tower"), default="auto")
    imaging.add_argument("--samples", type=int, default=200, help="sample budget in sampled mode")
    imaging.add_argument("--max-c", type=int, default=None, help="skip sampled elements with larger c")
    imaging.add_argument("--max-r", type=int, default=24, help="sampled mode draws c = r*q1*q2 with r <= this")
    imaging.add_argument("--cache", help="result cache path (default $DEDESUM_CACHE or ~/.cache/dedesum)")
    imaging.add_argument("--no-cache", action="store_true")
    imaging.add_argument("--timings", action="store_true", help="include timings in JSON output")
    imaging.add_argument("--paranoid", action="store_true", help="cross-check every sum against the sawtooth definition")

    p = argparse.ArgumentParser(prog="dedesum", description="Exact newform Dedekind sums.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("chars", parents=[common], help="list primitive characters mod q")
    s.add_argument("q", type=int)
    s.set_defaults(func=cmd_chars)

    s = sub.add_parser("eval", parents=[common, pairsel], help="evaluate S(a, c) or S(matrix)")
    s.add_argument("--ac", nargs=2, type=int, metavar=("A", "C"))
    s.add_argument("--matrix", help="'a,b,c,d'")
    s.add_argument("--formula", choices=EVALUATORS, default="fast")
    s.add_argument("--paranoid", action="store_true", help="cross-check against the sawtooth definition")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("verify", parents=[common, pairsel, ranges], help="run identity suites")
    s.add_argument("--paranoid", action="store_true", help="cross-check every sum against the sawtooth definition")
    s.add_argument("--suite", help="comma-separated: " + ",".join(list(PAIR_SUITES) + list(GLOBAL_SUITES)))
    s.add_argument("--samples", type=int, default=50)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("image", parents=[common, pairsel, ranges, imaging], help="image lattice S(Gamma1(q1 q2))")
    s.set_defaults(func=cmd_image)

    s = sub.add_parser("table", parents=[common, imaging], help="reproduce the four-row image table")
    s.add_argument("--golden", help="compare the markdown against this file")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("scan", parents=[common, ranges, imaging], help="image lattices over conductor ranges")
    s.add_argument("--quadratic-only", action="store_true")
    s.add_argument("--coprime-only", action="store_true")
    s.add_argument("--odd-only", action="store_true")
    s.add_argument("--max-level", type=int, help="skip pairs with q1*q2 above this")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "jobs", 1) < 1:
        sys.stderr.write("error: --jobs must be >= 1\n")
        return 2
    try:
        return args.func(args)
    except (UsageError, DedekindError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    except KeyboardInterrupt:
        # cache records are flushed line by line, so nothing is lost
        sys.stderr.write("interrupted\n")
        return 130


if __name__ == "__main__":
    sys.exit(main())
