"""Corpus runner and report rendering.

run_suite executes the selected checks on every corpus entry, records
verdicts with witnesses, and derives the list of theorem violations: results
that contradict a statement which is guaranteed for the group at hand
(regular implies regular power structure, powerful facts on powerful groups,
the Hughes classification on RPS groups, and so on).  A clean corpus yields
an empty violations list; anything else is an implementation bug by
construction, and the CLI exits nonzero on it.

Structured reports are deterministic: same corpus, same seed, byte-identical
output.  Timings are measured but serialized as null unless explicitly
requested, precisely so that determinism survives.
"""

from __future__ import annotations

import hashlib
import json
import time
import zlib
from dataclasses import dataclass, field

from . import __version__
from .config import DEFAULT_CAPS, Caps
from .errors import WorkbenchError
from .families import CorpusEntry
from .predicates import (
    PowerfulFactsReport,
    RpsReport,
    hall_congruence_exhaustive,
    has_regular_power_structure,
    is_metacyclic,
    is_pk_abelian,
    is_powerful,
    is_regular,
)
from .structure import (
    closure_subgroup,
    exponent,
    exponent_log,
    frattini_and_rank,
    handle_for,
    is_normal_subgroup,
    nilpotency_class,
)
from .table import build_table
from .theorems import (
    burnside_chain_verify,
    hughes_verdict,
    cyclic_normal_commutator_check,
    lemma42_construct,
    normal_abelian_cyclic_check,
    subgroup_rank_survey,
)

ALL_CHECKS = (
    "stats",
    "rps",
    "powerful",
    "regular",
    "metacyclic",
    "pk_abelian",
    "hall",
    "powerful_facts",
    "hughes",
    "burnside",
    "nac",
    "commutator_bound",
    "lemma42",
    "lift_survey",
)

N_CONST_KNOWN = {(2, 3): 27}  # largest d-generator group of exponent p, where known


@dataclass
class GroupResult:
    name: str
    order: int
    prime: int
    exponent: int
    nilpotency_class: int
    rank: int
    backend: str
    verdicts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    tool_version: str
    seed: int
    checks: tuple
    corpus_digest: str
    groups: list
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_seed(seed, name, check):
    return zlib.crc32(f"{seed}:{name}:{check}".encode())


def run_suite(entries, checks="all", seed: int = 0, caps: Caps = DEFAULT_CAPS) -> SuiteReport:
    if checks == "all" or checks is None:
        selected = ALL_CHECKS
    else:
        selected = tuple(c for c in ALL_CHECKS if c in set(checks))
        unknown = set(checks) - set(ALL_CHECKS)
        if unknown:
            raise WorkbenchError(f"unknown checks: {sorted(unknown)}")
    digest = hashlib.sha256("\n".join(e.describe() for e in entries).encode()).hexdigest()[:16]
    groups = []
    all_violations = []
    for entry in entries:
        result = _run_entry(entry, selected, seed, caps)
        groups.append(result)
        all_violations.extend(f"{result.name}: {v}" for v in result.violations)
    return SuiteReport(
        tool_version=__version__,
        seed=seed,
        checks=selected,
        corpus_digest=digest,
        groups=groups,
        violations=all_violations,
    )


def _build_handle(entry: CorpusEntry, caps: Caps):
    if entry.table is not None:
        return handle_for(entry.table)
    if entry.presentation.order <= caps.table:
        return handle_for(build_table(entry.presentation, cap=caps.table))
    return handle_for(entry.presentation, cap=caps.stream)


def _run_entry(entry: CorpusEntry, selected, seed, caps: Caps) -> GroupResult:
    G = _build_handle(entry, caps)
    result = GroupResult(
        name=entry.name,
        order=G.order,
        prime=G.prime,
        exponent=exponent(G),
        nilpotency_class=nilpotency_class(G),
        rank=frattini_and_rank(G).rank,
        backend=G.backend,
    )
    ctx = {}
    for check in selected:
        t0 = time.perf_counter()
        try:
            _CHECKS[check](G, entry, result, ctx, seed, caps)
        except WorkbenchError as exc:
            result.errors.append({"check": check, "error": f"{type(exc).__name__}: {exc}"})
            result.violations.append(f"{check} raised {type(exc).__name__}: {exc}")
        result.timings_ms[check] = (time.perf_counter() - t0) * 1000.0
    return result


def _witness_entry(check, witness):
    return {
        "check": check,
        "kind": witness.kind,
        "elements": list(witness.labels),
        "ids": list(witness.elements),
    }


def _check_stats(G, entry, result, ctx, seed, caps):
    summary = {
        "order": result.order,
        "exponent": result.exponent,
        "class": result.nilpotency_class,
        "d": result.rank,
    }
    result.verdicts["stats"] = summary
    if entry.expected:
        for key, want in entry.expected.items():
            if summary[key] != want:
                result.violations.append(
                    f"family advertises {key}={want} but the group has {key}={summary[key]}"
                )


def _check_rps(G, entry, result, ctx, seed, caps):
    rep: RpsReport = has_regular_power_structure(G)
    ctx["rps"] = rep
    conds = []
    for c1, c2, c3 in zip(rep.cond1, rep.cond2, rep.cond3):
        conds.append(
            {
                "i": c1.index,
                "powers_form_subgroup": c1.holds,
                "low_order_forms_subgroup": c2.holds,
                "index_matches_omega": c3.holds,
                "cardinalities": list(c3.cardinalities) if c3.cardinalities else None,
            }
        )
        for c, label in ((c1, "condition-1"), (c2, "condition-2")):
            if not c.holds:
                result.witnesses.append(
                    {"check": "rps", "kind": f"{label} witness at i={c.index}",
                     "elements": [c.witness_label], "ids": [c.witness]}
                )
        if not c3.holds:
            result.witnesses.append(
                {"check": "rps", "kind": f"condition-3 cardinalities at i={c3.index}",
                 "elements": [], "ids": [], "cardinalities": list(c3.cardinalities)}
            )
    result.verdicts["rps"] = {"overall": rep.overall, "e": rep.exponent_log, "conditions": conds}


def _check_powerful(G, entry, result, ctx, seed, caps):
    v = is_powerful(G)
    ctx["powerful"] = v
    result.verdicts["powerful"] = {"holds": v.holds}
    if v.witness:
        result.witnesses.append(_witness_entry("powerful", v.witness))


def _check_regular(G, entry, result, ctx, seed, caps):
    v = is_regular(G, caps=caps, seed=_check_seed(seed, result.name, "regular"))
    ctx["regular"] = v
    result.verdicts["regular"] = {"holds": v.holds, "mode": v.detail.get("mode")}
    if v.witness:
        result.witnesses.append(_witness_entry("regular", v.witness))
    rps = ctx.get("rps")
    if v.holds and rps is not None and not rps.overall:
        result.violations.append("regular group without regular power structure")


def _check_metacyclic(G, entry, result, ctx, seed, caps):
    v = is_metacyclic(G)
    ctx["metacyclic"] = v
    result.verdicts["metacyclic"] = {"holds": v.holds}
    if v.witness:
        result.witnesses.append(_witness_entry("metacyclic", v.witness))
    pw = ctx.get("powerful")
    if v.holds and G.prime % 2 and pw is not None and not pw.holds:
        result.violations.append("metacyclic odd-p group that is not powerful")


def _check_pk_abelian(G, entry, result, ctx, seed, caps):
    if not ctx.get("powerful", is_powerful(G)).holds:
        result.verdicts["pk_abelian"] = {"skipped": "not powerful"}
        return
    e = exponent_log(G)
    k = max(e - 1, 0)
    v = is_pk_abelian(G, k, caps=caps, seed=_check_seed(seed, result.name, "pk"))
    result.verdicts["pk_abelian"] = {"holds": v.holds, "k": k, "mode": v.detail.get("mode")}
    if v.witness:
        result.witnesses.append(_witness_entry("pk_abelian", v.witness))
    if not v.holds:
        result.violations.append(f"powerful group is not p^{k}-abelian")


def _check_hall(G, entry, result, ctx, seed, caps):
    if G.order > caps.hall_max_order:
        result.verdicts["hall"] = {"skipped": f"order above {caps.hall_max_order}"}
        return
    out = {}
    for n in (1, 2):
        ok, pair, nontrivial = hall_congruence_exhaustive(G, n)
        out[f"n={n}"] = {"holds": ok, "nontrivial_defects": nontrivial}
        if not ok:
            result.witnesses.append(
                {"check": "hall", "kind": f"pair violating the collection congruence at n={n}",
                 "elements": [G.label(pair[0]), G.label(pair[1])], "ids": list(pair)}
            )
            result.violations.append(f"collection congruence failed at n={n}; the congruence is universal")
    result.verdicts["hall"] = out


def _check_powerful_facts(G, entry, result, ctx, seed, caps):
    if not ctx.get("powerful", is_powerful(G)).holds:
        result.verdicts["powerful_facts"] = {"skipped": "not powerful"}
        return
    rep: PowerfulFactsReport = G.cache.get(("facts",))
    if rep is None:
        rep = powerful_facts_check_cached(G)
    result.verdicts["powerful_facts"] = {
        "holds": rep.overall,
        "power_set_equalities": [list(t) for t in rep.power_set_equalities],
        "commutator_containments": [list(t) for t in rep.commutator_containments],
        "gamma_containments": [list(t) for t in rep.gamma_containments],
    }
    if rep.witness:
        result.witnesses.append(_witness_entry("powerful_facts", rep.witness))
    if not rep.overall:
        result.violations.append("powerful-group facts failed")


def powerful_facts_check_cached(G):
    from .predicates import powerful_facts_check

    key = ("facts",)
    if key not in G.cache:
        G.cache[key] = powerful_facts_check(G)
    return G.cache[key]


def _check_hughes(G, entry, result, ctx, seed, caps):
    v = hughes_verdict(G)
    ctx["hughes"] = v
    result.verdicts["hughes"] = {
        "classification": v.classification,
        "order": v.order,
        "index": v.index,
    }
    if G.prime in (2, 3) and v.classification == "counterexample":
        result.violations.append("Hughes counterexample at p <= 3")
    rps = ctx.get("rps")
    if rps is not None and rps.overall:
        expo_is_p = result.exponent == G.prime
        if expo_is_p and v.classification != "trivial":
            result.violations.append("RPS group of exponent p with nontrivial Hughes subgroup")
        if not expo_is_p and result.order > 1 and v.classification != "whole-group":
            result.violations.append("RPS group of larger exponent whose Hughes subgroup is proper")


def _check_burnside(G, entry, result, ctx, seed, caps):
    rps = ctx.get("rps") or has_regular_power_structure(G)
    if not rps.overall:
        result.verdicts["burnside"] = {"skipped": "no regular power structure"}
        return
    n_const = N_CONST_KNOWN.get((result.rank, G.prime))
    rep = burnside_chain_verify(G, n_const=n_const)
    result.verdicts["burnside"] = {
        "holds": rep.overall,
        "e": rep.e,
        "order": rep.order,
        "index_gp": rep.index_gp,
        "omega1": rep.omega1_order,
        "decomposition": rep.decomposition_ok,
        "containment": rep.containment_ok,
        "omega_index": rep.omega_index_ok,
        "derived_bound": rep.derived_bound_ok,
        "derived_bound_sharp": rep.derived_bound_sharp,
        "n_const": rep.n_const,
        "n_const_sharp": rep.n_const_sharp,
    }
    if not rep.overall:
        result.violations.append("order-bound chain failed on an RPS group")


def _check_nac(G, entry, result, ctx, seed, caps):
    rep = normal_abelian_cyclic_check(G, caps=caps, seed=_check_seed(seed, result.name, "nac"))
    cyclic = max(G.orders()) == G.order
    result.verdicts["nac"] = {
        "mode": rep.mode,
        "hypothesis_holds": rep.hypothesis_holds,
        "group_cyclic": rep.group_cyclic,
        "checked": rep.checked,
    }
    if rep.witness_members is not None:
        result.witnesses.append(
            {"check": "nac", "kind": "normal abelian non-cyclic subgroup",
             "elements": [G.label(x) for x in rep.witness_members[:6]],
             "ids": list(rep.witness_members[:6]), "order": len(rep.witness_members)}
        )
    if G.prime % 2 and rep.mode == "exhaustive" and rep.hypothesis_holds and not cyclic:
        result.violations.append("odd-p group with all normal abelian subgroups cyclic is not cyclic")


def _check_commutator_bound(G, entry, result, ctx, seed, caps):
    if result.nilpotency_class <= 1:
        result.verdicts["commutator_bound"] = {"holds": True, "checked": 0, "note": "abelian"}
        return
    checked = 0
    seen = set()
    orders = G.orders()
    for x in sorted(range(G.order), key=lambda t: (-orders[t], t)):
        N = closure_subgroup(G, [x])
        if N.members in seen or N.order == 1:
            continue
        seen.add(N.members)
        if not is_normal_subgroup(G, N):
            continue
        v = cyclic_normal_commutator_check(G, N)
        checked += 1
        if not v.holds:
            result.verdicts["commutator_bound"] = {"holds": False, "checked": checked}
            result.violations.append("[N,G] escaped N^p for a cyclic normal N")
            return
    result.verdicts["commutator_bound"] = {"holds": True, "checked": checked}


def _check_lemma42(G, entry, result, ctx, seed, caps):
    if G.prime == 2 or not ctx.get("powerful", is_powerful(G)).holds:
        result.verdicts["lemma42"] = {"skipped": "needs an odd-p powerful group"}
        return
    instance = _lemma42_instance(G)
    if instance is None:
        result.verdicts["lemma42"] = {"skipped": "no generating pair with G^p = <a^p>"}
        return
    a, b = instance
    res = lemma42_construct(G, a, b, caps)
    result.verdicts["lemma42"] = {
        "holds": True,
        "a": G.label(a),
        "b": G.label(b),
        "c": res.c_label,
    }


def _lemma42_instance(G):
    """First (a, b) in id order with G = <a, b> and G^p = <a^p>, if any."""
    from .structure import agemo

    gp = agemo(G, 1).members
    orders = G.orders()
    target = max(orders)
    for a in range(1, G.order):
        if orders[a] != target:
            continue
        if closure_subgroup(G, [G.pow(a, G.prime)]).members != gp:
            continue
        for b in range(G.order):
            if closure_subgroup(G, [a, b]).order == G.order:
                return a, b
    return None


def _check_lift_survey(G, entry, result, ctx, seed, caps):
    if not ctx.get("powerful", is_powerful(G)).holds:
        result.verdicts["lift_survey"] = {"skipped": "not powerful"}
        return
    rep = subgroup_rank_survey(G, seed=_check_seed(seed, result.name, "survey"), caps=caps)
    result.verdicts["lift_survey"] = {
        "holds": not rep.violations,
        "mode": rep.mode,
        "subgroups": rep.subgroups_checked,
        "max_subgroup_rank": rep.max_subgroup_rank,
        "group_rank": rep.group_rank,
        "certificates": rep.certificates_checked,
    }
    if rep.violations:
        result.violations.append("a subgroup needs more generators than the group")


_CHECKS = {
    "stats": _check_stats,
    "rps": _check_rps,
    "powerful": _check_powerful,
    "regular": _check_regular,
    "metacyclic": _check_metacyclic,
    "pk_abelian": _check_pk_abelian,
    "hall": _check_hall,
    "powerful_facts": _check_powerful_facts,
    "hughes": _check_hughes,
    "burnside": _check_burnside,
    "nac": _check_nac,
    "commutator_bound": _check_commutator_bound,
    "lemma42": _check_lemma42,
    "lift_survey": _check_lift_survey,
}


# ---------------------------------------------------------------------------
# rendering


def report_to_document(report: SuiteReport, with_timings: bool = False) -> dict:
    """JSON-ready document; timings are nulled unless requested (determinism)."""
    groups = []
    for g in report.groups:
        groups.append(
            {
                "name": g.name,
                "order": g.order,
                "prime": g.prime,
                "exponent": g.exponent,
                "class": g.nilpotency_class,
                "d": g.rank,
                "backend": g.backend,
                "verdicts": g.verdicts,
                "witnesses": g.witnesses,
                "violations": g.violations,
                "errors": g.errors,
                "timings_ms": {k: round(v, 3) for k, v in g.timings_ms.items()} if with_timings else None,
            }
        )
    return {
        "tool_version": report.tool_version,
        "seed": report.seed,
        "checks": list(report.checks),
        "corpus_digest": report.corpus_digest,
        "groups": groups,
        "violations": report.violations,
    }


def render_report(report: SuiteReport, fmt: str = "text", with_timings: bool = False) -> str:
    if fmt == "json":
        doc = report_to_document(report, with_timings=with_timings)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt != "text":
        raise WorkbenchError(f"unknown report format {fmt!r}")
    lines = []
    header = f"{'group':32} {'order':>6} {'exp':>5} {'cl':>3} {'d':>2}  " + " ".join(
        f"{c:>10}" for c in report.checks if c != "stats"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for g in report.groups:
        cells = []
        for c in report.checks:
            if c == "stats":
                continue
            v = g.verdicts.get(c)
            cells.append(f"{_cell(v):>10}")
        lines.append(
            f"{g.name:32} {g.order:>6} {g.exponent:>5} {g.nilpotency_class:>3} {g.rank:>2}  "
            + " ".join(cells)
        )
        for w in g.witnesses:
            parts = ", ".join(w.get("elements") or [])
            extra = f" cardinalities={tuple(w['cardinalities'])}" if "cardinalities" in w else ""
            lines.append(f"    witness[{w['check']}] {w['kind']}: {parts}{extra}")
        for v in g.violations:
            lines.append(f"    VIOLATION: {v}")
        for e in g.errors:
            lines.append(f"    ERROR[{e['check']}]: {e['error']}")
    lines.append("")
    lines.append(f"corpus digest {report.corpus_digest}, seed {report.seed}")
    lines.append(
        "no theorem violations" if report.ok else f"{len(report.violations)} THEOREM VIOLATION(S)"
    )
    return "\n".join(lines) + "\n"


def _cell(v):
    if v is None:
        return "-"
    if "skipped" in v:
        return "skip"
    if "overall" in v:
        return "pass" if v["overall"] else "FAIL"
    if "holds" in v:
        return "pass" if v["holds"] else "FAIL"
    if "classification" in v:
        return v["classification"]
    return "done"
