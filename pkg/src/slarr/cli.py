"""Command line front end and batch driver.

Usage::

    slarr FILE                  decide every entailment in FILE ('-' for stdin)
    slarr -e "x -> 0 |- x -> 1" decide one entailment; exit code is the verdict
    slarr --bench Base 120 0    print a generated benchmark file
    slarr --bench Multi 40 1 --run   generate and decide it right away

Exit codes in single-entailment mode: 0 valid, 1 invalid, 2 condition
violation, 3 unknown, 4 usage or parse error.  Batch mode exits 0 unless
the input cannot be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backend import SOLVER_ENV, SolverConfig, SolverConfigError
from .bench import BenchSpec, bench_text, generate_bench, parse_family
from .parser import InputFile, ParseError, parse_entailment, parse_file
from .pipeline import RunOptions, Status, Verdict, decide
from .semantics import oracle_search
from .syntax import Entailment

__all__ = ["main", "run_batch", "BatchRow", "BatchReport", "BUCKETS", "EXIT_CODES"]

log = logging.getLogger(__name__)

EXIT_CODES = {
    Status.VALID: 0,
    Status.INVALID: 1,
    Status.CONDITION_VIOLATION: 2,
    Status.UNKNOWN: 3,
}
EXIT_USAGE = 4

# upper bounds in seconds; anything slower, or undecided for lack of time, is "timeout"
BUCKETS = (("<0.1s", 0.1), ("<1s", 1.0), ("<10s", 10.0), ("<300s", 300.0))


@dataclass
class BatchRow:
    name: str
    verdict: Verdict
    seconds: float
    oracle: Optional[str] = None  # "countermodel" | "none" when cross-checking
    error: Optional[str] = None

    @property
    def bucket(self) -> str:
        if self.verdict.status is Status.UNKNOWN and self.verdict.reason == "timeout":
            return "timeout"
        for label, limit in BUCKETS:
            if self.seconds < limit:
                return label
        return "timeout"

    @property
    def disagrees(self) -> bool:
        """Oracle and procedure contradict each other."""
        if self.oracle == "countermodel":
            return self.verdict.status is Status.VALID
        return False

    def as_dict(self) -> dict:
        st = self.verdict.stats
        d = {
            "name": self.name,
            "verdict": self.verdict.status.value,
            "seconds": round(self.seconds, 4),
            "permutations": st.permutations,
            "sorted_skipped": st.sorted_skipped,
            "succedents_pruned": st.succedents_pruned,
            "frames_removed": st.frames_removed,
            "solver_calls": st.solver_calls,
        }
        if self.verdict.reason:
            d["reason"] = self.verdict.reason
        if self.verdict.failing is not None:
            d["failing_ordering"] = list(self.verdict.failing)
        if self.verdict.countermodel is not None:
            cm = self.verdict.countermodel
            d["countermodel"] = {"store": dict(cm.store), "heap": {str(k): v for k, v in cm.heap.items()}}
        if self.verdict.report is not None and not self.verdict.report.ok:
            d["condition"] = str(self.verdict.report)
        if self.oracle is not None:
            d["oracle"] = self.oracle
        if self.error is not None:
            d["error"] = self.error
        return d

    def text(self, width: int) -> str:
        st = self.verdict.stats
        verdict = self.verdict.status.value if self.error is None else "error"
        line = (f"{self.name:<{width}}  {verdict:<19}  {self.seconds:8.3f}s  "
                f"perms={st.permutations} pruned={st.succedents_pruned} "
                f"frames={st.frames_removed} calls={st.solver_calls}")
        if self.oracle is not None:
            line += f" oracle={self.oracle}" + (" DISAGREE" if self.disagrees else "")
        if self.error is not None:
            line += f"  ({self.error})"
        elif self.verdict.status is Status.UNKNOWN and self.verdict.reason:
            line += f"  ({self.verdict.reason})"
        return line


@dataclass
class BatchReport:
    rows: list[BatchRow] = field(default_factory=list)

    def histogram(self) -> dict[str, int]:
        hist = {label: 0 for label, _ in BUCKETS}
        hist["timeout"] = 0
        for r in self.rows:
            hist[r.bucket] += 1
        return hist

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            key = "error" if r.error else r.verdict.status.value
            out[key] = out.get(key, 0) + 1
        return out

    @property
    def total_seconds(self) -> float:
        return sum(r.seconds for r in self.rows)

    def to_json(self) -> str:
        return json.dumps({
            "entailments": [r.as_dict() for r in self.rows],
            "summary": {"verdicts": self.counts(), "time_buckets": self.histogram(),
                        "total_seconds": round(self.total_seconds, 3)},
        }, indent=2)

    def to_text(self) -> str:
        if not self.rows:
            return ""
        width = max(len(r.name) for r in self.rows)
        lines = [r.text(width) for r in self.rows]
        hist = "  ".join(f"{k}: {v}" for k, v in self.histogram().items())
        verdicts = "  ".join(f"{k}: {v}" for k, v in sorted(self.counts().items()))
        lines.append(f"-- {len(self.rows)} entailments, {self.total_seconds:.2f}s total")
        lines.append(f"-- verdicts  {verdicts}")
        lines.append(f"-- time      {hist}")
        return "\n".join(lines) + "\n"


def _run_one(name: str, e: Entailment, opts: RunOptions, oracle: bool) -> BatchRow:
    t0 = time.perf_counter()
    try:
        v = decide(e, opts, name=name)
        err = None
    except SolverConfigError:
        raise
    except Exception as exc:  # isolate failures so the batch keeps going
        log.exception("%s failed", name)
        v, err = Verdict(Status.UNKNOWN, reason="internal-error"), f"{type(exc).__name__}: {exc}"
    row = BatchRow(name, v, time.perf_counter() - t0, error=err)
    if oracle and opts.oracle_bounds is not None:
        if v.status is Status.INVALID:
            found = v.countermodel is not None
        elif v.status is Status.CONDITION_VIOLATION:
            found = None
        else:
            found = oracle_search(e, *opts.oracle_bounds) is not None
        row.oracle = None if found is None else ("countermodel" if found else "none")
    return row


def run_batch(entries: InputFile, opts: RunOptions = RunOptions(), jobs: int = 1) -> BatchReport:
    """Decide every entry; rows keep input order whatever ``jobs`` is."""
    oracle = opts.oracle_bounds is not None
    if jobs <= 1:
        rows = [_run_one(n, e, opts, oracle) for n, e in entries]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda ne: _run_one(ne[0], ne[1], opts, oracle), entries))
    return BatchReport(rows)


# --------------------------------------------------------------------------
# Argument handling
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_arg_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slarr", description="Decide entailments of symbolic heaps with arrays.")
    p.add_argument("input", nargs="?", help="file of entailments, one per line ('-' for stdin)")
    p.add_argument("-e", "--entailment", help="decide a single entailment given on the command line")
    p.add_argument("--no-u", action="store_true", help="disable unsatisfiable-succedent pruning")
    p.add_argument("--no-f", action="store_true", help="disable the frame rule")
    p.add_argument("--simplify", action="store_true", help="simplify formulas before the solver")
    p.add_argument("--solver", help=f"solver executable (default: ${SOLVER_ENV} or z3)")
    p.add_argument("--solver-arg", action="append", metavar="ARG",
                   help="argument passed to the solver, written --solver-arg=-x for dashed "
                        "values; repeatable (default: -in)")
    p.add_argument("--timeout-ms", type=int, default=60_000, help="timeout of one solver call")
    p.add_argument("--time-limit", type=float, default=300.0, metavar="SECONDS",
                   help="wall-clock budget per entailment (0 for none)")
    p.add_argument("--dump-smt", metavar="DIR", help="write every validity query to DIR")
    p.add_argument("--oracle", nargs=2, type=int, metavar=("STORE_BOUND", "VALUE_BOUND"),
                   help="cross-check with the bounded model search")
    p.add_argument("--bench", nargs=3, metavar=("FAMILY", "COUNT", "SEED"),
                   help="generate a benchmark file (Base, SingleFrame2/3, SingleNFrame2/3, Multi)")
    p.add_argument("--run", action="store_true", help="with --bench: decide the generated file")
    p.add_argument("-o", "--output", help="with --bench: write the file here instead of stdout")
    p.add_argument("-j", "--jobs", type=int, default=1, help="entailments decided in parallel")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _options(args) -> RunOptions:
    cfg_kw = {"timeout_ms": args.timeout_ms}
    if args.solver:
        cfg_kw["executable"] = args.solver
    if args.solver_arg:
        cfg_kw["args"] = tuple(args.solver_arg)
    return RunOptions(
        enable_u=not args.no_u,
        enable_f=not args.no_f,
        enable_simplify=args.simplify,
        solver=SolverConfig(**cfg_kw),
        oracle_bounds=tuple(args.oracle) if args.oracle else None,
        deadline_s=args.time_limit or None,
        dump_dir=args.dump_smt,
    )


def _bench_spec(args) -> BenchSpec:
    family, n = parse_family(args.bench[0])
    return BenchSpec(family, int(args.bench[1]), int(args.bench[2]), n)


def _single(text: str, opts: RunOptions, fmt: str, out) -> int:
    e = parse_entailment(text)
    row = _run_one("entailment", e, opts, opts.oracle_bounds is not None)
    if fmt == "json":
        print(json.dumps(row.as_dict(), indent=2), file=out)
    else:
        print(row.verdict, file=out)
        if row.oracle is not None:
            print(f"oracle: {row.oracle}" + (" (DISAGREES)" if row.disagrees else ""), file=out)
    if row.error is not None:
        print(f"error: {row.error}", file=sys.stderr)
    return EXIT_CODES[row.verdict.status]


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    p = build_arg_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    modes = sum(x is not None for x in (args.input, args.entailment, args.bench))
    if modes != 1:
        p.print_usage(sys.stderr)
        print(f"{p.prog}: error: give exactly one of FILE, -e ENTAILMENT or --bench", file=sys.stderr)
        return EXIT_USAGE
    try:
        opts = _options(args)
        if args.bench:
            spec = _bench_spec(args)
            if not args.run:
                text = bench_text(spec)
                if args.output:
                    with open(args.output, "w") as fh:
                        fh.write(text)
                else:
                    out.write(text)
                return 0
            entries = generate_bench(spec)
        elif args.entailment is not None:
            return _single(args.entailment, opts, args.format, out)
        else:
            if args.input == "-":
                text = sys.stdin.read()
            else:
                with open(args.input) as fh:
                    text = fh.read()
            entries = parse_file(text)
        report = run_batch(entries, opts, jobs=args.jobs)
        out.write(report.to_json() + "\n" if args.format == "json" else report.to_text())
        return 0
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, SolverConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
