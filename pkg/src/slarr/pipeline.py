"""End-to-end decision procedure for array entailments."""

from __future__ import annotations

import enum
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .backend import Answer, SolverConfig, decide_validity
from .optimizer import apply_frame_rule, prune_many
from .semantics import Countermodel, oracle_search
from .sorted import SortedEntailment, iter_decompose
from .syntax import Entailment, separate_binders
from .translation import (
    ConditionReport, TranslationTimeout, build_validity_formula, check_condition,
)

__all__ = ["Status", "Verdict", "RunOptions", "Stats", "decide"]

log = logging.getLogger(__name__)


class Status(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    CONDITION_VIOLATION = "condition-violation"
    UNKNOWN = "unknown"


@dataclass
class Stats:
    permutations: int = 0
    sorted_skipped: int = 0
    succedents_pruned: int = 0
    frames_removed: int = 0
    solver_calls: int = 0


@dataclass(frozen=True)
class Verdict:
    status: Status
    failing: Optional[tuple[int, ...]] = None  # antecedent ordering of the failing sorted entailment
    countermodel: Optional[Countermodel] = None
    report: Optional[ConditionReport] = None
    reason: Optional[str] = None
    stats: Stats = field(default_factory=Stats, compare=False)

    def __str__(self) -> str:
        s = self.status.value
        if self.status is Status.INVALID:
            if self.failing is not None:
                s += f" (ordering {list(self.failing)})"
            if self.countermodel is not None:
                s += f" countermodel: {self.countermodel}"
        elif self.status is Status.CONDITION_VIOLATION:
            s += f": {self.report}"
        elif self.reason:
            s += f" ({self.reason})"
        return s


@dataclass(frozen=True)
class RunOptions:
    enable_u: bool = True
    enable_f: bool = True
    enable_simplify: bool = False
    solver: SolverConfig = field(default_factory=SolverConfig)
    oracle_bounds: Optional[tuple[int, int]] = None
    # wall-clock budget for one entailment, in seconds
    deadline_s: Optional[float] = None
    dump_dir: Optional[str] = None
    # when set, receives (ordering, trace nodes) for every translation performed
    traces: Optional[list] = field(default=None, compare=False)


def _solver_for(opts: RunOptions, stop: Optional[float]) -> SolverConfig:
    if stop is None:
        return opts.solver
    left_ms = int((stop - time.monotonic()) * 1000)
    return replace(opts.solver, timeout_ms=max(1, min(opts.solver.timeout_ms, left_ms)))


CHUNK = 24  # sorted entailments whose pruning queries share one solver run
CHUNK_QUERIES = 2000  # fewer entailments per run when each has many succedents


def _chunks(it, n):
    buf = []
    for x in it:
        buf.append(x)
        if len(buf) == n:
            yield buf
            buf = []
    if buf:
        yield buf


def decide(e: Entailment, opts: RunOptions = RunOptions(), name: str = "entailment") -> Verdict:
    """Decide validity of ``e``.

    Steps: condition check, frame elimination (F), decomposition into sorted
    entailments, then per sorted entailment succedent pruning (U), translation
    and one solver query.  With U the antecedent is first checked for
    satisfiability, and pruning queries for up to ``CHUNK`` sorted
    entailments, and at most about ``CHUNK_QUERIES`` queries, go to a single
    solver run.  The first invalid sorted
    entailment ends the run.
    """
    stats = Stats()
    stop = None if opts.deadline_s is None else time.monotonic() + opts.deadline_s

    report = check_condition(e)
    if not report.ok:
        return Verdict(Status.CONDITION_VIOLATION, report=report, stats=stats)

    e = separate_binders(e)
    original = e
    if opts.enable_f:
        e, stats.frames_removed = apply_frame_rule(e)

    unknown: Optional[str] = None
    first = True
    n_succ = sum(math.factorial(len(phi.spatial)) for phi in e.succedents)
    chunk_size = max(1, min(CHUNK, CHUNK_QUERIES // max(n_succ, 1)))
    for chunk in _chunks(enumerate(iter_decompose(e)), chunk_size):
        if stop is not None and time.monotonic() >= stop:
            return Verdict(Status.UNKNOWN, reason="timeout", stats=stats)
        if opts.enable_u:
            batch = [se.as_entailment() for _, se in chunk]
            if first:
                batch.insert(0, Entailment(e.antecedent, ()))
            results = prune_many(batch, _solver_for(opts, stop), check_antecedent=True)
            stats.solver_calls += 1
            if first:
                head, results = results[0], results[1:]
                if head[1].antecedent_unsat:
                    return Verdict(Status.VALID, stats=stats)
            todo = []
            for (k, se), (pruned, plog) in zip(chunk, results):
                stats.permutations += 1
                if plog.antecedent_unsat:
                    stats.sorted_skipped += 1
                    continue
                stats.succedents_pruned += len(plog.dropped)
                todo.append((k, SortedEntailment(se.antecedent, pruned.succedents, se.perm, se.base_pure)))
        else:
            stats.permutations += len(chunk)
            todo = chunk
        first = False
        for k, se in todo:
            trace = [] if opts.traces is not None else None
            try:
                f = build_validity_formula(se, fresh_prefix=f"z${k}_", check=False,
                                           simplify_leaves=opts.enable_simplify, deadline=stop,
                                           trace=trace)
            except TranslationTimeout:
                return Verdict(Status.UNKNOWN, reason="timeout", stats=stats)
            if trace is not None:
                opts.traces.append((se.perm, trace))
            dump = None
            if opts.dump_dir is not None:
                os.makedirs(opts.dump_dir, exist_ok=True)
                dump = os.path.join(opts.dump_dir, f"{name}.{k}.smt2")
            stats.solver_calls += 1
            bv = decide_validity(f, _solver_for(opts, stop), dump_path=dump)
            if bv.answer is Answer.INVALID:
                cm = None
                if opts.oracle_bounds is not None:
                    cm = oracle_search(original, *opts.oracle_bounds)
                return Verdict(Status.INVALID, failing=se.perm, countermodel=cm, stats=stats)
            if bv.answer is Answer.UNKNOWN:
                log.debug("%s: sorted entailment %s undecided (%s)", name, se.perm, bv.reason)
                unknown = unknown or bv.reason
    if unknown is not None:
        return Verdict(Status.UNKNOWN, reason=unknown, stats=stats)
    return Verdict(Status.VALID, stats=stats)
