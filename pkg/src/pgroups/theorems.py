"""Verifiers and constructive procedures for the main structural results.

Each operation either re-checks a chain of equalities/containments with all
cardinalities stored in the report, or constructs a witness object whose
defining equations are re-verified before it is returned.  A failed
re-verification raises: for statements that are theorems, a failure indicts
the implementation and must never be swallowed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .config import DEFAULT_CAPS, Caps
from .errors import EnumerationCapExceeded, PreconditionError, WorkbenchError
from . import table as tbl
from .predicates import has_regular_power_structure, is_powerful
from .structure import (
    FrattiniData,
    Subgroup,
    agemo,
    agemo_of_subgroup,
    as_table_group,
    closure_subgroup,
    commutator_id,
    coordinates_mod_frattini,
    derived_of_subgroup,
    enumerate_subgroups,
    exponent,
    exponent_log,
    frattini_and_rank,
    handle_for,
    is_abelian_subgroup,
    is_cyclic_subgroup,
    is_normal_subgroup,
    normal_closure,
    omega,
    power_image,
    rank_of,
    sample_subgroups,
    whole_group,
)


# ---------------------------------------------------------------------------
# Hughes subgroup


@dataclass(frozen=True)
class HughesVerdict:
    hughes_subgroup: Subgroup = field(compare=False)
    classification: str  # trivial | whole-group | index-p | counterexample
    index: int
    order: int


def hughes_subgroup(G) -> Subgroup:
    """Subgroup generated by the elements whose order is not p.

    The identity (order 1) is included; adding or removing it does not change
    the generated subgroup.
    """
    key = ("hughes",)
    if key not in G.cache:
        gens = [x for x, o in enumerate(G.orders()) if o != G.prime]
        G.cache[key] = closure_subgroup(G, gens)
    return G.cache[key]


def hughes_verdict(G) -> HughesVerdict:
    H = hughes_subgroup(G)
    index = G.order // H.order
    if H.order == 1:
        cls = "trivial"
    elif H.order == G.order:
        cls = "whole-group"
    elif index == G.prime:
        cls = "index-p"
    else:
        cls = "counterexample"
    return HughesVerdict(hughes_subgroup=H, classification=cls, index=index, order=H.order)


# ---------------------------------------------------------------------------
# order-bound chain for groups with regular power structure


@dataclass(frozen=True)
class BurnsideChainReport:
    e: int
    order: int
    quotient_order: int          # |G / G^{p^(e-1)}|
    top_power_order: int         # |G^{p^(e-1)}|
    omega1_order: int
    index_gp: int                # |G : G^p|
    decomposition_ok: bool       # |G| = quotient_order * top_power_order
    containment_ok: bool         # G^{p^(e-1)} <= Omega_1(G)
    omega_index_ok: bool         # |Omega_1(G)| = |G : G^p|
    derived_bound_ok: bool       # |G| <= |G : G^p|^e
    derived_bound_sharp: bool
    n_const: int | None = None
    n_const_bound_ok: bool | None = None
    n_const_sharp: bool | None = None
    quotient_bound_ok: bool | None = None   # |G/G^{p^(e-1)}| <= n_const^(e-1)

    @property
    def overall(self) -> bool:
        core = (self.decomposition_ok and self.containment_ok
                and self.omega_index_ok and self.derived_bound_ok)
        if self.n_const is not None:
            core = core and bool(self.n_const_bound_ok) and bool(self.quotient_bound_ok)
        return core


def burnside_chain_verify(G, n_const: int | None = None) -> BurnsideChainReport:
    """Re-check the order-bound proof chain on a group with regular power structure.

    Verifies |G| = |G/G^{p^(e-1)}| * |G^{p^(e-1)}|, the containment of
    G^{p^(e-1)} in Omega_1(G), the equality |Omega_1(G)| = |G : G^p|, and the
    self-contained corollary |G| <= |G : G^p|^e.  When the caller supplies the
    order n_const of the largest d-generator group of exponent p, also checks
    |G| <= n_const^e (with a sharpness flag) and the quotient bound.
    """
    rps = has_regular_power_structure(G)
    if not rps.overall:
        raise PreconditionError("order-bound chain requires regular power structure")
    e = rps.exponent_log
    if e == 0:
        return BurnsideChainReport(e=0, order=1, quotient_order=1, top_power_order=1,
                                   omega1_order=1, index_gp=1, decomposition_ok=True,
                                   containment_ok=True, omega_index_ok=True,
                                   derived_bound_ok=True, derived_bound_sharp=True)
    top = agemo(G, e - 1)
    om1 = omega(G, 1)
    index_gp = G.order // agemo(G, 1).order
    quotient_order = G.order // top.order
    report = BurnsideChainReport(
        e=e,
        order=G.order,
        quotient_order=quotient_order,
        top_power_order=top.order,
        omega1_order=om1.order,
        index_gp=index_gp,
        decomposition_ok=quotient_order * top.order == G.order,
        containment_ok=top.member_set <= om1.member_set,
        omega_index_ok=om1.order == index_gp,
        derived_bound_ok=G.order <= index_gp ** e,
        derived_bound_sharp=G.order == index_gp ** e,
        n_const=n_const,
        n_const_bound_ok=None if n_const is None else G.order <= n_const ** e,
        n_const_sharp=None if n_const is None else G.order == n_const ** e,
        quotient_bound_ok=None if n_const is None else quotient_order <= n_const ** (e - 1),
    )
    return report


# ---------------------------------------------------------------------------
# constructive order-p complement generator


@dataclass(frozen=True)
class Lemma42Result:
    c: int
    c_label: str
    lambdas: tuple  # lambda chosen at each recursion level, deepest first


def lemma42_construct(G, a: int, b: int, caps: Caps = DEFAULT_CAPS) -> Lemma42Result:
    """For powerful G = <a, b> with G^p = <a^p>, build c of order p with G = <a, c>.

    Follows the induction on the exponent: recurse in G/G^{p^k}, lift the
    solution d, solve d^p = a^(lambda p^k) by searching 0 <= lambda < p, and
    return d * a^(-lambda p^(k-1)).  The output is re-verified; a wrong order
    or a proper <a, c> raises, since the construction is guaranteed to work.
    """
    G = handle_for(G)
    if G.order == 1:
        raise PreconditionError("construction needs a nontrivial group")
    if not is_powerful(G).holds:
        raise PreconditionError("construction requires a powerful group")
    if closure_subgroup(G, [a, b]).order != G.order:
        raise PreconditionError("a and b do not generate the group")
    ap = G.pow(a, G.prime)
    if closure_subgroup(G, [ap]).members != agemo(G, 1).members:
        raise PreconditionError("G^p is not generated by a^p")
    T = as_table_group(G)
    lambdas = []
    c = _lemma42_table(T, a, b, lambdas)
    p = G.prime
    if G.order_of(c) != p:
        raise WorkbenchError(
            f"constructed element {G.label(c)} has order {G.order_of(c)}, not {p}; "
            "this contradicts a guaranteed construction and indicts the implementation"
        )
    if closure_subgroup(G, [a, c]).order != G.order:
        raise WorkbenchError(
            f"<a, {G.label(c)}> is a proper subgroup; "
            "this contradicts a guaranteed construction and indicts the implementation"
        )
    return Lemma42Result(c=c, c_label=G.label(c), lambdas=tuple(lambdas))


def _lemma42_table(T: tbl.TableGroup, a: int, b: int, lambdas: list) -> int:
    p = T.prime
    expo = max(T.orders)
    if expo <= p:
        # powerful + exponent p means elementary abelian
        if b != 0:
            return b
        return T.power_id(a, T.orders[a] // p)
    q = expo // p          # exponent is p^(k+1); q = p^k
    powers = {T.power_id(x, q) for x in range(T.order)}
    Gpk = tbl.closure(T, powers)
    Q = tbl.quotient_table(T, Gpk)
    abar = Q.projection[a]
    bbar = Q.projection[b]
    dbar = _lemma42_table(Q, abar, bbar, lambdas)
    d = Q.lifted_reps[dbar]
    dp = T.power_id(d, p)
    lam = None
    for cand in range(p):
        if dp == T.power_id(a, cand * q):
            lam = cand
            break
    if lam is None:
        raise WorkbenchError("d^p escaped <a^(p^k)>; recursion invariant broken")
    lambdas.append(lam)
    c = T.mul_ids(d, T.power_id(a, -lam * (q // p)))
    if c == 0:
        # d was a power of a, so the group is cyclic; any order-p power of a works
        c = T.power_id(a, T.orders[a] // p)
    return c


def _log(n: int, p: int) -> int:
    e = 0
    while n > 1:
        n //= p
        e += 1
    return e


# ---------------------------------------------------------------------------
# normal abelian subgroups all cyclic


@dataclass(frozen=True)
class NormalAbelianCyclicReport:
    mode: str                    # exhaustive | sampled
    hypothesis_holds: bool
    group_cyclic: bool
    checked: int
    witness_members: tuple | None = None   # a normal abelian non-cyclic subgroup


def normal_abelian_cyclic_check(G, caps: Caps = DEFAULT_CAPS, seed: int = 0,
                                samples: int | None = None) -> NormalAbelianCyclicReport:
    """Scan (normal, abelian) subgroups for non-cyclic ones.

    Exhaustive up to |G| <= p^4; above that, normal closures of single
    elements plus sampled subgroups, with the report labeled accordingly.
    """
    exhaustive = G.order <= G.prime ** caps.lattice_exponent
    if exhaustive:
        subs = enumerate_subgroups(G, caps=caps)
        mode = "exhaustive"
    else:
        seen = {}
        for x in range(G.order):
            s = normal_closure(G, [x])
            seen.setdefault(s.members, s)
        for s in sample_subgroups(G, samples or caps.subgroup_samples, seed=seed):
            seen.setdefault(s.members, s)
        subs = sorted(seen.values(), key=lambda s: (s.order, s.members))
        mode = "sampled"
    witness = None
    checked = 0
    for S in subs:
        if not is_normal_subgroup(G, S):
            continue
        if not is_abelian_subgroup(G, S):
            continue
        checked += 1
        if not is_cyclic_subgroup(G, S):
            witness = S
            break
    group_cyclic = max(G.orders()) == G.order
    return NormalAbelianCyclicReport(
        mode=mode,
        hypothesis_holds=witness is None,
        group_cyclic=group_cyclic,
        checked=checked,
        witness_members=witness.members if witness is not None else None,
    )


@dataclass(frozen=True)
class CommutatorBoundVerdict:
    holds: bool
    commutator_order: int
    power_order: int


def cyclic_normal_commutator_check(G, N: Subgroup, pair_budget: int = 500_000) -> CommutatorBoundVerdict:
    """For cyclic normal N: [N, G] <= N^p."""
    if not is_cyclic_subgroup(G, N):
        raise PreconditionError("N must be cyclic")
    if not is_normal_subgroup(G, N):
        raise PreconditionError("N must be normal")
    if len(N) * G.order <= pair_budget:
        seeds = {commutator_id(G, n, g) for n in N.members for g in range(G.order)}
    else:
        seeds = {commutator_id(G, n, g) for n in N.members for g in G.generators}
    seeds.discard(0)
    comm = normal_closure(G, seeds) if seeds else closure_subgroup(G, [])
    npow = agemo_of_subgroup(G, N, 1)
    return CommutatorBoundVerdict(
        holds=comm.member_set <= npow.member_set,
        commutator_order=comm.order,
        power_order=npow.order,
    )


# ---------------------------------------------------------------------------
# minimal generation of subgroups of powerful groups


@dataclass(frozen=True)
class IndependenceCertificate:
    subgroup_members: tuple
    generators: tuple      # minimal generating set h_1..h_r of H
    powers: tuple          # b_i with h_i = a_i^(p^b_i)
    lifted: tuple          # the a_i, none of them in G^p
    rank: int              # F_p rank of the lifted images mod Phi(G)
    rank_target: int       # d(H)


def minimal_generating_set(G, H: Subgroup):
    """Greedy minimal generating set of H (Burnside basis inside H)."""
    if H.order == 1:
        return [], 0
    p = G.prime
    gens = H.generators if H.generators else H.members
    phi_gens = set(G.pow(h, p) for h in H.members)
    phi_gens |= set(derived_of_subgroup(G, H).members)
    phi = closure_subgroup(G, phi_gens)
    d = _log(H.order // phi.order, p)
    picked = []
    current = phi
    for h in H.members:
        if current.order == H.order:
            break
        if h not in current:
            picked.append(h)
            current = closure_subgroup(G, list(current.generators) + [h])
    if len(picked) != d or current.order != H.order:
        raise WorkbenchError("greedy generating set disagrees with the Frattini index of H")
    return picked, d


def _root_fiber(G, b: int):
    """Map value -> sorted list of x with x^(p^b) = value."""
    key = ("root_fiber", b)
    if key not in G.cache:
        pp = G.pp_map()
        cur = list(range(G.order))
        for _ in range(b):
            cur = [pp[x] for x in cur]
        fib = {}
        for x, v in enumerate(cur):
            fib.setdefault(v, []).append(x)
        G.cache[key] = fib
    return G.cache[key]


def lift_independent_set(G, H: Subgroup, caps: Caps = DEFAULT_CAPS) -> IndependenceCertificate:
    """Express a minimal generating set of H <= G maximally as p-th powers and
    lift to independent elements mod G^p.

    For powerful G, every h_i in a minimal generating set of H can be written
    h_i = a_i^(p^b_i) with a_i outside G^p (take b_i maximal); the images of
    a_1..a_r in G/Phi(G) then have full rank r = d(H), which yields
    d(H) <= d(G).  Any rank defect or missing root raises loudly.
    """
    if not is_powerful(G).holds:
        raise PreconditionError("independent-set lifting requires a powerful group")
    gens, r = minimal_generating_set(G, H)
    e = exponent_log(G)
    gp = agemo(G, 1)
    powers = []
    lifted = []
    for h in gens:
        b = 0
        for cand in range(e, 0, -1):
            if h in power_image(G, cand):
                b = cand
                break
        root = None
        for x in _root_fiber(G, b).get(h, ()):
            if x not in gp:
                root = x
                break
        if root is None:
            raise WorkbenchError(
                f"every p^{b}-th root of {G.label(h)} lies in G^p; "
                "this contradicts the lifting guarantee for powerful groups"
            )
        powers.append(b)
        lifted.append(root)
    F = frattini_and_rank(G)
    vectors = [coordinates_mod_frattini(G, x, F) for x in lifted]
    rank = rank_of(vectors, G.prime) if vectors else 0
    if rank != r:
        raise WorkbenchError(
            f"lifted set has rank {rank} but d(H) = {r}; "
            "this contradicts the independence guarantee for powerful groups"
        )
    # re-verify the root equations and non-membership before certifying
    for h, b, x in zip(gens, powers, lifted):
        if G.pow(x, G.prime ** b) != h or x in gp:
            raise WorkbenchError("independence certificate failed re-verification")
    return IndependenceCertificate(
        subgroup_members=H.members,
        generators=tuple(gens),
        powers=tuple(powers),
        lifted=tuple(lifted),
        rank=rank,
        rank_target=r,
    )


@dataclass(frozen=True)
class SurveyReport:
    mode: str
    subgroups_checked: int
    max_subgroup_rank: int
    group_rank: int
    violations: tuple
    certificates_checked: int


def subgroup_rank_survey(G, samples: int | None = None, seed: int = 0,
                         caps: Caps = DEFAULT_CAPS, with_certificates: bool = True) -> SurveyReport:
    """d(H) <= d(G) over enumerated (small G) or sampled subgroups of powerful G."""
    if not is_powerful(G).holds:
        raise PreconditionError("rank survey requires a powerful group")
    if G.order <= G.prime ** caps.lattice_exponent:
        subs = enumerate_subgroups(G, caps=caps)
        mode = "exhaustive"
    else:
        subs = sample_subgroups(G, samples or caps.subgroup_samples, seed=seed)
        mode = "sampled"
    dG = frattini_and_rank(G).rank
    max_rank = 0
    violations = []
    certs = 0
    for H in subs:
        if with_certificates:
            cert = lift_independent_set(G, H, caps)
            dH = cert.rank_target
            certs += 1
        else:
            _, dH = minimal_generating_set(G, H)
        max_rank = max(max_rank, dH)
        if dH > dG:
            violations.append(H.members)
    return SurveyReport(
        mode=mode,
        subgroups_checked=len(subs),
        max_subgroup_rank=max_rank,
        group_rank=dG,
        violations=tuple(violations),
        certificates_checked=certs,
    )
