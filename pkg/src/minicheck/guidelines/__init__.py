"""Rule registry and the decidable checks."""

from __future__ import annotations

from .checks import (
    check_const_candidates_R8_13,
    check_cstring_R21_14_19,
    check_determinate_for_R14_1_2,
    check_eof_domain_R21_13,
    check_file_deref_R22_5,
    check_init_at_decl_R9_1,
    check_no_recursion_R17_2,
    check_readonly_params_R17_8,
)
from .common import HEURISTIC, PROFILES, STRICT, CheckContext
from .diagnostics import DEFINITE, EXACT, OVER, POSSIBLE, UNDER, Diagnostic, Verdict, sort_diagnostics
from .errno import check_errno_protocol_R22_8_9_10
from .ownership import check_stream_ownership_R22_1
from .registry import GuidelineInfo, lookup, registry, render_table, rule_key

# Checks run by ``run_checks``; the coverage-based ones live elsewhere.
CHECKS = {
    "file-deref-r22-5": check_file_deref_R22_5,
    "readonly-params-r17-8": check_readonly_params_R17_8,
    "const-candidates-r8-13": check_const_candidates_R8_13,
    "init-at-decl-r9-1": check_init_at_decl_R9_1,
    "determinate-for-r14-1-2": check_determinate_for_R14_1_2,
    "no-recursion-r17-2": check_no_recursion_R17_2,
    "eof-domain-r21-13": check_eof_domain_R21_13,
    "cstring-r21-14-19": check_cstring_R21_14_19,
    "errno-protocol-r22-8-9-10": check_errno_protocol_R22_8_9_10,
    "stream-ownership-r22-1": check_stream_ownership_R22_1,
}


def run_checks(unit, facts, profile=STRICT, enabled=None) -> list[Diagnostic]:
    """Run the selected checks (all by default) and return sorted findings."""
    ctx = CheckContext(unit, facts, profile)
    for check_id, fn in CHECKS.items():
        if enabled is None or check_id in enabled:
            fn(ctx)
    return sort_diagnostics(ctx.found)


__all__ = [
    "CHECKS",
    "CheckContext",
    "DEFINITE",
    "Diagnostic",
    "EXACT",
    "GuidelineInfo",
    "HEURISTIC",
    "OVER",
    "POSSIBLE",
    "PROFILES",
    "STRICT",
    "UNDER",
    "Verdict",
    "lookup",
    "registry",
    "render_table",
    "rule_key",
    "run_checks",
    "sort_diagnostics",
]
