"""Deciding entailments end to end, generated benchmarks and batch reports.

Run with ``python demos/06_pipeline_and_batches.py``.  Needs an SMT solver.
The same steps are available from the shell::

    slarr -e "x -> 0 |- x -> 1"
    slarr --bench Base 120 0 -o base.txt
    slarr base.txt --oracle 3 3 --format json
"""

from slarr import RunOptions, decide, parse_entailment
from slarr.bench import BenchSpec, bench_text, generate_bench
from slarr.cli import run_batch

for text in ("Arr(x, x) |- x -> 0, Ex y. y > 0 & x -> y",
             "x -> 0 |- x -> 1",
             "Arr(1, 5) |- Ex y. Arr(1, 1 + y) * Arr(2 + y, 5)"):
    v = decide(parse_entailment(text), RunOptions(oracle_bounds=(2, 2)))
    print(f"{text}\n  {v}")

spec = BenchSpec("Multi", 6, seed=1)
print("\n" + bench_text(spec))

report = run_batch(generate_bench(spec), RunOptions(oracle_bounds=(3, 3)))
print(report.to_text())
