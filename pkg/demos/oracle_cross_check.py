"""Run generated programs concretely and compare with the static facts."""

import sys
from pathlib import Path

from minicheck.flow import analyze
from minicheck.oracle import sweep
from minicheck.sema import load

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from progen import generate  # noqa: E402


def main(count: int = 20):
    for seed in range(count):
        unit = load(generate(seed), f"gen{seed}.c")
        facts = analyze(unit)
        result = sweep(unit, "f")
        bad_reach = result.ever_executed & facts.unreachable
        bad_dead = result.witnessed_live_stores & facts.dead_stores
        outcomes = ", ".join(f"{k}={v}" for k, v in sorted(result.outcomes.items()))
        status = "ok" if not (bad_reach or bad_dead) else "VIOLATION"
        print(f"seed {seed:3}: {result.runs:3} runs, {len(result.ever_executed):2} stmts seen, "
              f"{len(facts.unreachable):2} unreachable, {len(facts.dead_stores)} dead stores; {outcomes}; {status}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
