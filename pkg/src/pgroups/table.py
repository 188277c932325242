"""Brute-force multiplication tables: the oracle every other backend is checked against.

A TableGroup stores the full N x N product table plus independently computed
inverses and element orders.  Tables built from a presentation get their
entries from the collection engine and are then verified as groups from
scratch (identity, latin-square rows/columns, associativity); the p = 2
negative-control families (dihedral, quaternion, semidihedral) are written
down directly from their textbook multiplication formulas so they do not
depend on the collection engine at all.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CAPS
from .errors import (
    EnumerationCapExceeded,
    InconsistentPresentationError,
    NotASubgroupError,
    NotNormalError,
    PresentationError,
)
from .pc import PcPresentation, _collect_core, _vector_pairs, element_label, enumerate_elements

ASSOC_EXHAUSTIVE_LIMIT = 4096
ASSOC_SAMPLE_TRIPLES = 1_000_000


class TableGroup:
    """Explicit finite group: ids 0..N-1 with 0 the identity."""

    __slots__ = ("order", "prime", "mul", "inv", "orders", "labels", "name",
                 "generators", "pc_elements", "parent", "lifted_reps", "projection")

    def __init__(self, mul, prime, labels=None, name=None, generators=(),
                 pc_elements=None, parent=None, lifted_reps=None, projection=None, verify=True):
        mul = np.asarray(mul, dtype=np.int32)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise PresentationError("multiplication table must be square")
        n = mul.shape[0]
        self.order = n
        self.prime = prime
        self.mul = mul
        self.mul.setflags(write=False)
        self.labels = tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(n))
        self.name = name
        self.generators = tuple(generators)
        self.pc_elements = tuple(pc_elements) if pc_elements is not None else None
        self.parent = parent
        self.lifted_reps = tuple(lifted_reps) if lifted_reps is not None else None
        self.projection = tuple(projection) if projection is not None else None
        if verify:
            _verify_axioms(mul)
        self.inv = _inverses(mul)
        self.orders = _orders_by_table(mul)

    def __len__(self):
        return self.order

    def mul_ids(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inv_id(self, a: int) -> int:
        return int(self.inv[a])

    def power_id(self, a: int, k: int) -> int:
        if k < 0:
            a = int(self.inv[a])
            k = -k
        acc, base = 0, a
        while k:
            if k & 1:
                acc = int(self.mul[acc, base])
            k >>= 1
            if k:
                base = int(self.mul[base, base])
        return acc

    def label(self, a: int) -> str:
        return self.labels[a]

    def __repr__(self):
        nm = self.name or "table"
        return f"<TableGroup {nm} order={self.order} p={self.prime}>"


def _verify_axioms(mul: np.ndarray):
    n = mul.shape[0]
    if n == 0:
        raise PresentationError("empty table")
    if mul.min() < 0 or mul.max() >= n:
        raise InconsistentPresentationError("table entries out of range")
    ar = np.arange(n)
    if not np.array_equal(mul[0], ar) or not np.array_equal(mul[:, 0], ar):
        raise InconsistentPresentationError("id 0 is not a two-sided identity")
    # latin square: every row/column a permutation, so inverses exist
    if not (np.array_equal(np.sort(mul, axis=1), np.tile(ar, (n, 1)))
            and np.array_equal(np.sort(mul, axis=0), np.tile(ar[:, None], (1, n)))):
        raise InconsistentPresentationError("table rows/columns are not permutations")
    if n <= ASSOC_EXHAUSTIVE_LIMIT:
        for a in range(n):
            if not np.array_equal(mul[mul[a]], mul[a][mul]):
                raise InconsistentPresentationError(f"associativity fails with left factor id {a}")
    else:
        rng = np.random.default_rng(0)
        for _ in range(10):
            k = ASSOC_SAMPLE_TRIPLES // 10
            a = rng.integers(0, n, k)
            b = rng.integers(0, n, k)
            c = rng.integers(0, n, k)
            if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
                raise InconsistentPresentationError("associativity fails on sampled triples")


def _inverses(mul: np.ndarray):
    inv = np.argmin(mul, axis=1).astype(np.int32)  # position of 0 per row
    inv.setflags(write=False)
    return inv


def _orders_by_table(mul: np.ndarray):
    n = mul.shape[0]
    orders = [1] * n
    for x in range(1, n):
        y = x
        k = 1
        while y != 0:
            y = int(mul[y, x])
            k += 1
        orders[x] = k
    return tuple(orders)


def build_table(P: PcPresentation, cap: int = DEFAULT_CAPS.table,
                budget: int = DEFAULT_CAPS.collect_budget) -> TableGroup:
    """Realize a presentation as an explicit table.

    Entries are computed by collection over all pairs of normal forms; the
    result is then verified as a group from the table alone, so an
    inconsistent presentation is rejected here independently of
    check_consistency.
    """
    N = P.order
    if N > cap:
        raise EnumerationCapExceeded(f"group order {N} exceeds table cap {cap}")
    p, n = P.prime, P.ngens
    elements = enumerate_elements(P, cap)
    pair_lists = [_vector_pairs(e.exponents) for e in elements]
    weights = [p ** i for i in range(n)]
    mul = np.empty((N, N), dtype=np.int32)
    mul[0] = np.arange(N)
    mul[:, 0] = np.arange(N)
    for x_id in range(1, N):
        xp = pair_lists[x_id]
        row = mul[x_id]
        for y_id in range(1, N):
            vec, _, _ = _collect_core(P, xp + pair_lists[y_id], budget)
            r = 0
            for g, e in enumerate(vec):
                if e:
                    r += e * weights[g]
            row[y_id] = r
    gens = tuple(weights[: n])
    labels = tuple(element_label(e) for e in elements)
    return TableGroup(mul, prime=p, labels=labels, name=P.name, generators=gens,
                      pc_elements=elements)


# ---------------------------------------------------------------------------
# element sets and subgroup machinery on tables


@dataclass(frozen=True)
class ElementSet:
    """Sorted, deduplicated ids inside a parent table group."""

    parent: TableGroup = field(compare=False)
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


def closure(G: TableGroup, gens) -> ElementSet:
    """Least subset containing the generators and id, closed under the table product."""
    gens = sorted(set(int(g) for g in gens))
    if gens and not (0 <= gens[0] and gens[-1] < G.order):
        raise PresentationError("generator id out of range")
    members = np.zeros(G.order, dtype=bool)
    members[0] = True
    frontier = [0]
    if gens:
        garr = np.array(gens, dtype=np.int32)
        for g in gens:
            if not members[g]:
                members[g] = True
                frontier.append(g)
        while frontier:
            prods = np.unique(G.mul[np.ix_(np.array(frontier, dtype=np.int32), garr)])
            new = prods[~members[prods]]
            members[new] = True
            frontier = list(new)
    ids = tuple(int(i) for i in np.flatnonzero(members))
    return ElementSet(parent=G, members=ids, generators=tuple(gens))


def _require_closed(G: TableGroup, S: ElementSet):
    m = np.array(S.members, dtype=np.int32)
    prods = G.mul[np.ix_(m, m)]
    mask = np.zeros(G.order, dtype=bool)
    mask[m] = True
    if not mask[prods].all():
        raise NotASubgroupError("element set is not closed under multiplication")


def is_normal(G: TableGroup, S: ElementSet) -> bool:
    """Exhaustive conjugation test over every g in G, s in S."""
    _require_closed(G, S)
    m = np.array(S.members, dtype=np.int32)
    mask = np.zeros(G.order, dtype=bool)
    mask[m] = True
    gs = G.mul[:, m]                      # (N, |S|): g*s
    conj = G.mul[gs, G.inv[:, None]]      # g*s*g^-1
    return bool(mask[conj].all())


def quotient_table(G: TableGroup, N: ElementSet) -> TableGroup:
    """Coset group G/N; cosets represented by their minimum element id."""
    if not is_normal(G, N):
        raise NotNormalError("quotient by a non-normal subgroup")
    m = np.array(N.members, dtype=np.int32)
    rep = G.mul[:, m].min(axis=1).astype(np.int32)   # min of each left coset
    reps = np.unique(rep)
    idx_of = {int(r): i for i, r in enumerate(reps)}
    q = np.array([idx_of[int(rep[x])] for x in range(G.order)], dtype=np.int32)
    qmul = q[G.mul[np.ix_(reps, reps)]]
    labels = tuple(f"[{G.labels[int(r)]}]" for r in reps)
    gens = tuple(sorted(set(int(q[g]) for g in G.generators if q[g] != 0)))
    name = f"{G.name}/N{len(m)}" if G.name else None
    return TableGroup(qmul, prime=G.prime, labels=labels, name=name, generators=gens,
                      parent=G, lifted_reps=tuple(int(r) for r in reps),
                      projection=tuple(int(v) for v in q))


# ---------------------------------------------------------------------------
# handwritten p = 2 control families


def _table_from_formula(n, mul_fn, labels, prime, name, generators):
    mul = np.fromfunction(np.vectorize(mul_fn, otypes=[np.int32]), (n, n), dtype=int)
    return TableGroup(mul, prime=prime, labels=labels, name=name, generators=generators)


def dihedral_table(order: int) -> TableGroup:
    """D_2^k with elements r^i s^j, id = (i + h*j) for half-order h."""
    h = order // 2
    if order < 8 or order != 2 ** (order.bit_length() - 1) or h < 4:
        raise PresentationError("dihedral control groups are built for orders 2^k >= 8")

    def mul_fn(x, y):
        i, j = int(x) % h, int(x) // h
        i2, j2 = int(y) % h, int(y) // h
        if j == 0:
            return (i + i2) % h + h * j2
        return (i - i2) % h + h * ((1 + j2) % 2)

    labels = [_rs_label(i, j, h, "r", "s") for j in (0, 1) for i in range(h)]
    return _table_from_formula(order, mul_fn, labels, 2, f"D{order}", (1, h))


def quaternion_table(order: int) -> TableGroup:
    """Generalized quaternion group: a of order 2^(k-1), b^2 = a^(h/2), a^b = a^-1."""
    h = order // 2
    if order < 8 or order != 2 ** (order.bit_length() - 1) or h < 4:
        raise PresentationError("quaternion control groups are built for orders 2^k >= 8")

    def mul_fn(x, y):
        i, j = int(x) % h, int(x) // h
        i2, j2 = int(y) % h, int(y) // h
        if j == 0:
            return (i + i2) % h + h * j2
        i3 = (i - i2) % h
        if j2 == 0:
            return i3 + h
        return (i3 + h // 2) % h

    labels = [_rs_label(i, j, h, "a", "b") for j in (0, 1) for i in range(h)]
    return _table_from_formula(order, mul_fn, labels, 2, f"Q{order}", (1, h))


def semidihedral_table(order: int) -> TableGroup:
    """SD_2^k: a of order 2^(k-1), b^2 = 1, a^b = a^(h/2 - 1)."""
    h = order // 2
    if order < 16 or order != 2 ** (order.bit_length() - 1):
        raise PresentationError("semidihedral control groups are built for orders 2^k >= 16")
    t = h // 2 - 1

    def mul_fn(x, y):
        i, j = int(x) % h, int(x) // h
        i2, j2 = int(y) % h, int(y) // h
        if j == 0:
            return (i + i2) % h + h * j2
        return (i + i2 * t) % h + h * ((1 + j2) % 2)

    labels = [_rs_label(i, j, h, "a", "b") for j in (0, 1) for i in range(h)]
    return _table_from_formula(order, mul_fn, labels, 2, f"SD{order}", (1, h))


def _rs_label(i, j, h, rot, ref):
    parts = []
    if i:
        parts.append(rot + (f"^{i}" if i > 1 else ""))
    if j:
        parts.append(ref)
    return "*".join(parts) if parts else "id"


# ---------------------------------------------------------------------------
# table dump (diffing aid; not load-bearing)


def dump_table_csv(G: TableGroup, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in G.mul:
            writer.writerow(int(v) for v in row)


def load_table_csv(path, prime, **kwargs) -> TableGroup:
    with open(path, newline="") as fh:
        rows = [[int(v) for v in row] for row in csv.reader(fh) if row]
    return TableGroup(np.array(rows, dtype=np.int32), prime=prime, **kwargs)
