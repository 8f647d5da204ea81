"""Same source, two profiles: which findings survive and with what verdict."""

from minicheck.flow import analyze
from minicheck.guidelines import HEURISTIC, STRICT, run_checks
from minicheck.sema import load

SOURCE = """\
#include <stdio.h>

static void log_once(void)
{
}

static void (*const hook)(void) = &log_once;

int read_flag(FILE *fp, int enabled)
{
    int c;
    if (enabled) {
        c = fgetc(fp);
    }
    hook();
    return c;
}
"""


def main():
    unit = load(SOURCE, "flag.c")
    facts = analyze(unit)
    for profile in (STRICT, HEURISTIC):
        print(f"== {profile}")
        for d in run_checks(unit, facts, profile):
            s = d.span
            print(f"  {s.line}:{s.column} {d.rule_id:6} {d.verdict.kind:8} {d.message}")


if __name__ == "__main__":
    main()
