"""Subgroup-theoretic machinery over either backend.

A GroupHandle wraps a consistent presentation (collection-backed) or a
TableGroup and exposes one id-based element API: ids are positions in
enumeration order, id 0 the identity.  Everything here is computed from the
handle primitives only, so running the same operation on both backends and
comparing element-for-element is a meaningful oracle test.

Handles memoize expensive results (p-th power map, orders, derived series,
agemo/omega) with compute-once semantics: results are pure functions of the
group, so concurrent readers racing on the cache can only store identical
values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .config import DEFAULT_CAPS, Caps
from .errors import (
    EnumerationCapExceeded,
    MixedPresentationError,
    NotASubgroupError,
    PresentationError,
)
from . import pc
from .pc import Element, PcPresentation
from .table import TableGroup, build_table


class PcGroupHandle:
    """Collection-backed element arithmetic on integer ids."""

    backend = "presentation"

    def __init__(self, pres: PcPresentation, cap: int = DEFAULT_CAPS.stream):
        if pres.order > cap:
            raise EnumerationCapExceeded(f"group order {pres.order} exceeds streaming cap {cap}")
        self.pres = pres
        self.prime = pres.prime
        self.order = pres.order
        self.name = pres.name
        self._elements = pc.enumerate_elements(pres, cap)
        self._weights = [pres.prime ** i for i in range(pres.ngens)]
        self.generators = tuple(self._weights) if pres.ngens else ()
        self._pp = None
        self._orders = None
        self.cache = {}

    def _rank(self, x: Element) -> int:
        r = 0
        for e, w in zip(x.exponents, self._weights):
            if e:
                r += e * w
        return r

    def element(self, i: int) -> Element:
        return self._elements[i]

    def id_of(self, x: Element) -> int:
        if x.pres is not self.pres:
            raise MixedPresentationError("element belongs to a different presentation")
        return self._rank(x)

    def mul(self, a: int, b: int) -> int:
        x = self._elements[a]
        y = self._elements[b]
        vec, _, _ = pc._collect_core(
            self.pres, pc._vector_pairs(x.exponents) + pc._vector_pairs(y.exponents), DEFAULT_CAPS.collect_budget
        )
        r = 0
        for e, w in zip(vec, self._weights):
            if e:
                r += e * w
        return r

    def inv(self, a: int) -> int:
        return self._rank(pc.inverse(self._elements[a]))

    def pow(self, a: int, k: int) -> int:
        return self._rank(pc.power(self._elements[a], k))

    def pp_map(self):
        """id -> id of the p-th power, for every element."""
        if self._pp is None:
            self._pp = [self.pow(a, self.prime) for a in range(self.order)]
        return self._pp

    def order_of(self, a: int) -> int:
        return self.orders()[a]

    def orders(self):
        if self._orders is None:
            pp = self.pp_map()
            orders = [0] * self.order
            orders[0] = 1
            for a in range(1, self.order):
                k = 0
                y = a
                while y != 0:
                    y = pp[y]
                    k += 1
                orders[a] = self.prime ** k
            self._orders = orders
        return self._orders

    def label(self, a: int) -> str:
        return pc.element_label(self._elements[a])

    @property
    def mul_table(self):
        return None

    def __repr__(self):
        return f"<PcGroupHandle {self.name or ''} order={self.order} p={self.prime}>"


class TableGroupHandle:
    """Table-backed element arithmetic on integer ids."""

    backend = "table"

    def __init__(self, table: TableGroup):
        self.table = table
        self.prime = table.prime
        self.order = table.order
        self.name = table.name
        self.generators = tuple(table.generators)
        self._pp = None
        self.cache = {}

    def mul(self, a: int, b: int) -> int:
        return int(self.table.mul[a, b])

    def inv(self, a: int) -> int:
        return int(self.table.inv[a])

    def pow(self, a: int, k: int) -> int:
        return self.table.power_id(a, k)

    def pp_map(self):
        if self._pp is None:
            self._pp = [self.table.power_id(a, self.prime) for a in range(self.order)]
        return self._pp

    def order_of(self, a: int) -> int:
        return self.table.orders[a]

    def orders(self):
        return list(self.table.orders)

    def label(self, a: int) -> str:
        return self.table.labels[a]

    @property
    def mul_table(self):
        return self.table.mul

    def __repr__(self):
        return f"<TableGroupHandle {self.name or ''} order={self.order} p={self.prime}>"


def handle_for(obj, cap: int = DEFAULT_CAPS.stream):
    """Wrap a presentation, table, or handle into a GroupHandle."""
    if isinstance(obj, (PcGroupHandle, TableGroupHandle)):
        return obj
    if isinstance(obj, PcPresentation):
        return PcGroupHandle(obj, cap)
    if isinstance(obj, TableGroup):
        return TableGroupHandle(obj)
    raise TypeError(f"cannot build a group handle from {type(obj).__name__}")


def as_table_group(G, cap: int = DEFAULT_CAPS.table) -> TableGroup:
    """The TableGroup behind a handle, building (and caching) one if needed."""
    if isinstance(G, TableGroupHandle):
        return G.table
    key = ("table",)
    if key not in G.cache:
        G.cache[key] = build_table(G.pres, cap)
    return G.cache[key]


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    """Full member set of a subgroup, with the generators that produced it."""

    parent: object = field(compare=False)
    members: tuple
    generators: tuple = ()

    def __post_init__(self):
        ordered = tuple(sorted(set(int(m) for m in self.members)))
        object.__setattr__(self, "members", ordered)
        object.__setattr__(self, "_member_set", frozenset(ordered))

    @property
    def member_set(self):
        return self._member_set

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self._member_set

    def __len__(self):
        return len(self.members)

    def __le__(self, other: "Subgroup") -> bool:
        return self._member_set <= other._member_set


def _bfs_closure(G, gens):
    members = {0}
    members.update(gens)
    frontier = list(members)
    mul = G.mul
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in members:
                    members.add(y)
                    new.append(y)
        frontier = new
    return members


def closure_subgroup(G, gens) -> Subgroup:
    """Subgroup generated by the given ids.

    Incremental: generators already inside the current closure are skipped, so
    the BFS only ever runs with an essential generating list (at most
    log_p |result| long).  Result equals the naive breadth-first closure.
    """
    essential = []
    members = {0}
    for g in sorted(set(int(g) for g in gens)):
        if not 0 <= g < G.order:
            raise PresentationError("generator id out of range")
        if g in members:
            continue
        essential.append(g)
        members = _bfs_closure(G, essential)
    return Subgroup(parent=G, members=tuple(members), generators=tuple(essential))


def whole_group(G) -> Subgroup:
    return Subgroup(parent=G, members=tuple(range(G.order)), generators=tuple(G.generators))


def trivial_subgroup(G) -> Subgroup:
    return Subgroup(parent=G, members=(0,), generators=())


def commutator_id(G, a: int, b: int) -> int:
    """[a, b] = a^-1 b^-1 a b as ids."""
    return G.mul(G.mul(G.mul(G.inv(a), G.inv(b)), a), b)


def conjugate_id(G, a: int, g: int) -> int:
    """a^g = g^-1 a g."""
    return G.mul(G.mul(G.inv(g), a), g)


def normal_closure(G, seed_ids, under=None) -> Subgroup:
    """Smallest subgroup containing the seeds and closed under conjugation.

    `under` restricts the conjugating generators (defaults to generators of G,
    which gives the normal closure in G).
    """
    under = list(G.generators if under is None else under)
    sub = closure_subgroup(G, seed_ids)
    while True:
        new = set()
        for s in sub.members:
            for g in under:
                c = conjugate_id(G, s, g)
                if c not in sub:
                    new.add(c)
        if not new:
            return sub
        sub = closure_subgroup(G, list(sub.generators) + list(new))


def is_normal_subgroup(G, S: Subgroup) -> bool:
    for g in G.generators:
        for s in S.members:
            if conjugate_id(G, s, g) not in S:
                return False
    return True


def is_abelian_subgroup(G, S: Subgroup) -> bool:
    ms = S.members
    for i, a in enumerate(ms):
        for b in ms[i + 1 :]:
            if G.mul(a, b) != G.mul(b, a):
                return False
    return True


def is_cyclic_subgroup(G, S: Subgroup) -> bool:
    n = len(S)
    return any(G.order_of(m) == n for m in S.members)


def subgroup_contains(S: Subgroup, x: int) -> bool:
    return x in S


# ---------------------------------------------------------------------------
# power and omega structure


def power_image(G, i: int):
    """The raw set { g^(p^i) } as a frozenset of ids (not closed)."""
    key = ("power_image", i)
    if key not in G.cache:
        pp = G.pp_map()
        cur = list(range(G.order))
        for _ in range(i):
            cur = [pp[x] for x in cur]
        G.cache[key] = frozenset(cur)
    return G.cache[key]


def agemo(G, i: int) -> Subgroup:
    """Subgroup generated by all p^i-th powers."""
    key = ("agemo", i)
    if key not in G.cache:
        G.cache[key] = closure_subgroup(G, power_image(G, i))
    return G.cache[key]


def low_order_set(G, i: int):
    """The raw set { g : o(g) <= p^i } as a frozenset of ids."""
    key = ("low_order_set", i)
    if key not in G.cache:
        bound = G.prime ** i
        G.cache[key] = frozenset(x for x, o in enumerate(G.orders()) if o <= bound)
    return G.cache[key]


def omega(G, i: int) -> Subgroup:
    """Subgroup generated by the elements of order at most p^i."""
    key = ("omega", i)
    if key not in G.cache:
        G.cache[key] = closure_subgroup(G, low_order_set(G, i))
    return G.cache[key]


def exponent(G) -> int:
    key = ("exponent",)
    if key not in G.cache:
        G.cache[key] = max(G.orders())
    return G.cache[key]


def exponent_log(G) -> int:
    """e with exponent(G) = p^e."""
    e = 0
    x = exponent(G)
    while x > 1:
        x //= G.prime
        e += 1
    return e


# ---------------------------------------------------------------------------
# series


@dataclass(frozen=True)
class SeriesReport:
    kind: str
    terms: tuple
    class_or_length: int


def derived_subgroup(G) -> Subgroup:
    key = ("derived",)
    if key not in G.cache:
        seeds = [commutator_id(G, a, b) for a, b in combinations(G.generators, 2)]
        G.cache[key] = normal_closure(G, seeds)
    return G.cache[key]


def center(G) -> Subgroup:
    key = ("center",)
    if key not in G.cache:
        gens = G.generators
        members = [x for x in range(G.order) if all(G.mul(x, g) == G.mul(g, x) for g in gens)]
        G.cache[key] = Subgroup(parent=G, members=tuple(members), generators=tuple(members))
    return G.cache[key]


def lower_central_series(G) -> SeriesReport:
    """gamma_1 = G, gamma_{k+1} = [gamma_k, G], until trivial."""
    key = ("lcs",)
    if key not in G.cache:
        terms = [whole_group(G)]
        while terms[-1].order > 1:
            prev = terms[-1]
            seeds = set()
            for s in prev.members:
                for g in G.generators:
                    c = commutator_id(G, s, g)
                    if c:
                        seeds.add(c)
            nxt = normal_closure(G, seeds) if seeds else trivial_subgroup(G)
            if nxt.order >= prev.order and prev.order > 1:
                raise PresentationError("lower central series did not descend; not nilpotent?")
            terms.append(nxt)
        G.cache[key] = SeriesReport(kind="lower-central", terms=tuple(terms), class_or_length=len(terms) - 1)
    return G.cache[key]


def upper_central_series(G) -> SeriesReport:
    """Z_0 = 1, Z_{i+1}/Z_i = Z(G/Z_i), until the whole group."""
    key = ("ucs",)
    if key not in G.cache:
        terms = [trivial_subgroup(G)]
        while terms[-1].order < G.order:
            prev = terms[-1]
            members = [
                x
                for x in range(G.order)
                if all(commutator_id(G, x, g) in prev for g in G.generators)
            ]
            nxt = Subgroup(parent=G, members=tuple(members), generators=tuple(members))
            if nxt.order <= prev.order:
                raise PresentationError("upper central series did not ascend; not nilpotent?")
            terms.append(nxt)
        G.cache[key] = SeriesReport(kind="upper-central", terms=tuple(terms), class_or_length=len(terms) - 1)
    return G.cache[key]


def nilpotency_class(G) -> int:
    return lower_central_series(G).class_or_length


def commutator_subgroup_of(G, A: Subgroup, B: Subgroup, pair_budget: int = 200_000) -> Subgroup:
    """[A, B] for subgroups of G.

    Uses the full commutator set when |A|*|B| is small; otherwise commutators
    of the stored generators followed by a normal closure in G (valid when A
    and B are normal in G, which is how this is used: power subgroups and
    derived subgroups are characteristic).
    """
    if len(A) * len(B) <= pair_budget:
        seeds = {commutator_id(G, a, b) for a in A.members for b in B.members}
        seeds.discard(0)
        return normal_closure(G, seeds) if seeds else trivial_subgroup(G)
    seeds = {commutator_id(G, a, b) for a in A.generators for b in B.generators}
    seeds.discard(0)
    return normal_closure(G, seeds) if seeds else trivial_subgroup(G)


def agemo_of_subgroup(G, S: Subgroup, i: int = 1) -> Subgroup:
    """Subgroup generated by the p^i-th powers of the members of S."""
    q = G.prime ** i
    return closure_subgroup(G, {G.pow(s, q) for s in S.members})


def derived_of_subgroup(G, S: Subgroup) -> Subgroup:
    """[S, S] from the stored generators, closed under conjugation by S's generators."""
    gens = S.generators if S.generators else S.members
    seeds = {commutator_id(G, a, b) for a, b in combinations(gens, 2)}
    seeds.discard(0)
    if not seeds:
        return Subgroup(parent=G, members=(0,), generators=())
    return normal_closure(G, seeds, under=gens)


# ---------------------------------------------------------------------------
# Frattini subgroup, minimal generation, F_p linear algebra


@dataclass(frozen=True)
class FrattiniData:
    frattini: Subgroup
    rank: int
    basis: tuple


def frattini_and_rank(G) -> FrattiniData:
    """Frattini subgroup (p-th powers and commutators), rank, and a greedy basis."""
    key = ("frattini",)
    if key not in G.cache:
        der = derived_subgroup(G)
        gens = set(power_image(G, 1)) | set(der.generators)
        phi = closure_subgroup(G, gens)
        quotient_size = G.order // phi.order
        d = 0
        x = quotient_size
        while x > 1:
            x //= G.prime
            d += 1
        if G.prime ** d != quotient_size:
            raise PresentationError("Frattini index is not a p-power; inconsistent input")
        basis = []
        current = phi
        for x in range(G.order):
            if current.order == G.order:
                break
            if x not in current:
                basis.append(x)
                current = closure_subgroup(G, list(current.generators) + [x])
        if len(basis) != d:
            raise PresentationError("greedy basis size disagrees with Frattini index")
        G.cache[key] = FrattiniData(frattini=phi, rank=d, basis=tuple(basis))
    return G.cache[key]


def minimal_rank(G) -> int:
    return frattini_and_rank(G).rank


def coordinates_mod_frattini(G, x: int, F: FrattiniData):
    """Coordinates of x's image in G/Phi(G) w.r.t. F.basis, found by membership search."""
    p = G.prime
    d = F.rank
    phi = F.frattini
    coeffs = [0] * d
    while True:
        word = 0
        for b, c in zip(F.basis, coeffs):
            if c:
                word = G.mul(word, G.pow(b, c))
        if G.mul(G.inv(word), x) in phi:
            return tuple(coeffs)
        k = 0
        while k < d:
            coeffs[k] += 1
            if coeffs[k] < p:
                break
            coeffs[k] = 0
            k += 1
        if k == d:
            raise PresentationError("element not expressible over the Frattini basis")


def rank_of(vectors, p: int) -> int:
    """Rank of a set of F_p vectors by Gaussian elimination."""
    rows = [list(v) for v in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while col < ncols and rank < len(rows):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col] % p, -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


# ---------------------------------------------------------------------------
# subgroup enumeration


def enumerate_subgroups(G, max_gens: int | None = None, caps: Caps = DEFAULT_CAPS):
    """All subgroups, found by growing generator sets one element at a time.

    Complete for max_gens = n because a subgroup of order p^m has a
    generating chain adding one generator per step; equivalent to closing
    every generator subset of size <= max_gens, but only extends distinct
    subgroups, which keeps the search desk-sized.
    """
    limit = G.prime ** caps.lattice_exponent
    if G.order > limit:
        raise EnumerationCapExceeded(
            f"exhaustive subgroup enumeration capped at order {limit}; use sampled mode"
        )
    if max_gens is None:
        max_gens = _log_p(G.order, G.prime)
    found = {(0,): trivial_subgroup(G)}
    frontier = [trivial_subgroup(G)]
    for _ in range(max_gens):
        new = []
        for sub in frontier:
            for x in range(1, G.order):
                if x in sub:
                    continue
                ext = closure_subgroup(G, list(sub.generators) + [x])
                if ext.members not in found:
                    found[ext.members] = ext
                    new.append(ext)
        if not new:
            break
        frontier = new
    return sorted(found.values(), key=lambda s: (s.order, s.members))


def sample_subgroups(G, samples: int, seed: int = 0, max_gens: int | None = None):
    """Distinct subgroups from random generator subsets; deterministic per seed."""
    rng = random.Random(seed)
    if max_gens is None:
        max_gens = min(3, max(1, _log_p(G.order, G.prime)))
    found = {}
    out = []
    for _ in range(samples):
        k = rng.randint(1, max_gens)
        gens = rng.sample(range(G.order), k)
        sub = closure_subgroup(G, gens)
        if sub.members not in found:
            found[sub.members] = sub
            out.append(sub)
    return out


def _log_p(n: int, p: int) -> int:
    e = 0
    while n > 1:
        if n % p:
            raise PresentationError(f"{n} is not a power of {p}")
        n //= p
        e += 1
    return e
