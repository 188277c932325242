"""Power-commutator presentations of finite p-groups and the collection engine.

A presentation has generators g1..gn, every generator of relative order p.
Rule words are normal words: for g_i^p a word in generators above i, and for
[g_j, g_i] (j > i) a word in generators above j.  A consistent presentation
defines a group of order exactly p^n whose elements are exponent vectors;
`collect` rewrites an arbitrary word to its unique normal form using
collection from the left.

Indices are 0-based in the Python API and 1-based in the text format.
Presentations and elements are immutable; every function here is pure, so
concurrent use needs no synchronization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .config import DEFAULT_CAPS
from .errors import (
    CollectionBudgetExceeded,
    EnumerationCapExceeded,
    MixedPresentationError,
    PcParseError,
    PresentationError,
)

DEFAULT_COLLECT_BUDGET = DEFAULT_CAPS.collect_budget


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CollectionStats:
    """Work done by one collection call."""

    steps: int
    max_stack_depth: int


class PcPresentation:
    """Immutable weighted power-commutator presentation, relative orders all p."""

    __slots__ = (
        "prime",
        "ngens",
        "power_rules",
        "commutator_rules",
        "name",
        "_power_pairs",
        "_power_inv_pairs",
        "_comm_pairs",
    )

    def __init__(self, prime, ngens, power_rules=None, commutator_rules=None, name=None):
        if not isinstance(prime, int) or not is_prime(prime):
            raise PresentationError(f"p must be prime, got {prime!r}")
        if not isinstance(ngens, int) or ngens < 0:
            raise PresentationError(f"generator count must be >= 0, got {ngens!r}")
        n = ngens
        zero = (0,) * n
        if power_rules is None:
            power_rules = [zero] * n
        power_rules = [self._check_vector(v, prime, n, f"power rule for g{i + 1}") for i, v in enumerate(power_rules)]
        if len(power_rules) != n:
            raise PresentationError(f"expected {n} power rules, got {len(power_rules)}")
        for i, v in enumerate(power_rules):
            if any(e and k <= i for k, e in enumerate(v)):
                raise PresentationError(f"power rule for g{i + 1} must use only generators above g{i + 1}")
        comms = {}
        for key, v in (commutator_rules or {}).items():
            j, i = key
            if not (0 <= i < j < n):
                raise PresentationError(f"commutator key must have n > j > i >= 0, got {key!r}")
            v = self._check_vector(v, prime, n, f"commutator rule [g{j + 1},g{i + 1}]")
            if any(e and k <= j for k, e in enumerate(v)):
                raise PresentationError(f"commutator rule [g{j + 1},g{i + 1}] must use only generators above g{j + 1}")
            if any(v):
                comms[(j, i)] = v
        self.prime = prime
        self.ngens = n
        self.power_rules = tuple(power_rules)
        self.commutator_rules = dict(comms)
        self.name = name
        self._power_pairs = tuple(_vector_pairs(v) for v in self.power_rules)
        self._power_inv_pairs = tuple(
            tuple((g, -e) for g, e in reversed(pairs)) for pairs in self._power_pairs
        )
        self._comm_pairs = {k: _vector_pairs(v) for k, v in comms.items()}

    @staticmethod
    def _check_vector(v, p, n, what):
        v = tuple(int(e) for e in v)
        if len(v) != n:
            raise PresentationError(f"{what}: word has length {len(v)}, expected {n}")
        if any(not 0 <= e < p for e in v):
            raise PresentationError(f"{what}: exponents must lie in [0, {p})")
        return v

    @property
    def order(self) -> int:
        return self.prime ** self.ngens

    @property
    def identity(self) -> "Element":
        return Element((0,) * self.ngens, self)

    def generator(self, i: int) -> "Element":
        if not 0 <= i < self.ngens:
            raise PresentationError(f"generator index {i} out of range")
        v = [0] * self.ngens
        v[i] = 1
        return Element(tuple(v), self)

    def generators(self):
        return [self.generator(i) for i in range(self.ngens)]

    def __eq__(self, other):
        if not isinstance(other, PcPresentation):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.ngens == other.ngens
            and self.power_rules == other.power_rules
            and self.commutator_rules == other.commutator_rules
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.prime, self.ngens, self.power_rules, tuple(sorted(self.commutator_rules.items()))))

    def __repr__(self):
        label = f" name={self.name}" if self.name else ""
        return f"<PcPresentation p={self.prime} n={self.ngens}{label}>"


class Element:
    """A normal word: exponent vector with entries in [0, p)."""

    __slots__ = ("exponents", "pres")

    def __init__(self, exponents, pres):
        self.exponents = tuple(exponents)
        self.pres = pres

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.pres is other.pres and self.exponents == other.exponents

    def __hash__(self):
        return hash((id(self.pres), self.exponents))

    def __mul__(self, other):
        return multiply(self, other)

    def __pow__(self, k):
        return power(self, k)

    def is_identity(self) -> bool:
        return not any(self.exponents)

    def __repr__(self):
        return f"Element({element_label(self)})"


def _vector_pairs(v):
    return tuple((g, e) for g, e in enumerate(v) if e)


def _collect_core(P: PcPresentation, pairs, budget: int):
    """Collection from the left. Returns (vector, steps, max working length)."""
    p = P.prime
    n = P.ngens
    power = P._power_pairs
    power_inv = P._power_inv_pairs
    comm = P._comm_pairs
    work = [[g, e] for g, e in pairs if e]
    for g, _ in work:
        if not 0 <= g < n:
            raise PresentationError(f"generator index {g} out of range for n={n}")
    steps = 0
    maxlen = len(work)
    i = 0
    while i < len(work):
        g, e = work[i]
        if e == 0:
            del work[i]
            if i > 0:
                i -= 1
            continue
        if i + 1 < len(work) and work[i + 1][0] == g:
            work[i][1] = e + work[i + 1][1]
            del work[i + 1]
            continue
        if e < 0 or e >= p:
            # g^e = g^r (g^p)^q, peeled one power word at a time
            r = e % p
            q = (e - r) // p
            w = power[g]
            if not w:
                work[i][1] = r
                steps += 1
                continue
            if q > 0:
                repl = ([[g, r]] if r else []) + [list(t) for t in w] + ([[g, (q - 1) * p]] if q > 1 else [])
            else:
                repl = ([[g, r]] if r else []) + [list(t) for t in power_inv[g]] + (
                    [[g, (q + 1) * p]] if q < -1 else []
                )
            work[i : i + 1] = repl
            steps += 1
            if steps > budget:
                raise CollectionBudgetExceeded(f"collection exceeded {budget} steps")
            if len(work) > maxlen:
                maxlen = len(work)
            if i > 0:
                i -= 1
            continue
        if i + 1 < len(work):
            g2, e2 = work[i + 1]
            if g2 < g:
                if e2 <= 0 or e2 >= p:
                    i += 1
                    continue
                w = comm.get((g, g2))
                steps += 1
                if steps > budget:
                    raise CollectionBudgetExceeded(f"collection exceeded {budget} steps")
                if w is None:
                    work[i], work[i + 1] = work[i + 1], work[i]
                else:
                    # g^e g2 = g2 (g [g, g2])^e
                    block = [[g, 1]] + [list(t) for t in w]
                    repl = [[g2, 1]] + block * e + ([[g2, e2 - 1]] if e2 > 1 else [])
                    work[i : i + 2] = repl
                    if len(work) > maxlen:
                        maxlen = len(work)
                if i > 0:
                    i -= 1
                continue
        i += 1
    vec = [0] * n
    for g, e in work:
        vec[g] = e
    return tuple(vec), steps, maxlen


def collect(word, P: PcPresentation, budget: int = DEFAULT_COLLECT_BUDGET) -> Element:
    """Normal form of a word given as (generator index, exponent) pairs."""
    vec, _, _ = _collect_core(P, word, budget)
    return Element(vec, P)


def collect_with_stats(word, P: PcPresentation, budget: int = DEFAULT_COLLECT_BUDGET):
    vec, steps, depth = _collect_core(P, word, budget)
    return Element(vec, P), CollectionStats(steps=steps, max_stack_depth=depth)


def _same_presentation(x: Element, y: Element):
    if x.pres is not y.pres:
        raise MixedPresentationError("operands belong to different presentations")


def multiply(x: Element, y: Element, budget: int = DEFAULT_COLLECT_BUDGET) -> Element:
    _same_presentation(x, y)
    word = _vector_pairs(x.exponents) + _vector_pairs(y.exponents)
    vec, _, _ = _collect_core(x.pres, word, budget)
    return Element(vec, x.pres)


def inverse(x: Element, budget: int = DEFAULT_COLLECT_BUDGET) -> Element:
    word = tuple((g, -e) for g, e in reversed(_vector_pairs(x.exponents)))
    vec, _, _ = _collect_core(x.pres, word, budget)
    return Element(vec, x.pres)


def power(x: Element, k: int, budget: int = DEFAULT_COLLECT_BUDGET) -> Element:
    """x^k by square-and-multiply; k may be negative."""
    if k < 0:
        x = inverse(x, budget)
        k = -k
    acc = x.pres.identity
    base = x
    while k:
        if k & 1:
            acc = multiply(acc, base, budget)
        k >>= 1
        if k:
            base = multiply(base, base, budget)
    return acc


def element_order(x: Element) -> int:
    """Least p^k with x^(p^k) = identity, by repeated p-th powering."""
    p = x.pres.prime
    y = x
    k = 0
    while not y.is_identity():
        y = power(y, p)
        k += 1
        if k > x.pres.ngens:
            raise PresentationError("order computation did not terminate; presentation inconsistent?")
    return p ** k


def element_rank(x: Element) -> int:
    """Position of x in enumeration order (g1 varies fastest)."""
    p = x.pres.prime
    r = 0
    for e in reversed(x.exponents):
        r = r * p + e
    return r


def element_from_rank(P: PcPresentation, r: int) -> Element:
    p = P.prime
    vec = []
    for _ in range(P.ngens):
        r, e = divmod(r, p)
        vec.append(e)
    if r:
        raise PresentationError(f"rank out of range for order {P.order}")
    return Element(tuple(vec), P)


def enumerate_elements(P: PcPresentation, cap: int = DEFAULT_CAPS.stream):
    """All p^n elements in enumeration order; raises when the group exceeds cap."""
    if P.order > cap:
        raise EnumerationCapExceeded(f"group order {P.order} exceeds enumeration cap {cap}")
    p, n = P.prime, P.ngens
    out = []
    vec = [0] * n
    for _ in range(P.order):
        out.append(Element(tuple(vec), P))
        for k in range(n):
            vec[k] += 1
            if vec[k] < p:
                break
            vec[k] = 0
    return out


def element_label(x: Element) -> str:
    """Normal-word notation, e.g. 'g1*g3^2'; 'id' for the identity."""
    parts = [f"g{g + 1}" + (f"^{e}" if e > 1 else "") for g, e in _vector_pairs(x.exponents)]
    return "*".join(parts) if parts else "id"


# ---------------------------------------------------------------------------
# consistency


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    test_word: str | None = None
    lhs: tuple | None = None
    rhs: tuple | None = None

    def __bool__(self):
        return self.consistent


def check_consistency(P: PcPresentation, budget: int = DEFAULT_COLLECT_BUDGET) -> ConsistencyReport:
    """Evaluate the standard overlap test words by collection.

    The presentation is consistent (group order exactly p^n) iff every test
    word collects to the same normal form along both bracketings:

      g_k (g_j g_i) = (g_k g_j) g_i        for k > j > i
      (g_j^p) g_i   = g_j^(p-1) (g_j g_i)  for j > i
      g_j (g_i^p)   = (g_j g_i) g_i^(p-1)  for j > i
      (g_i^p) g_i   = g_i (g_i^p)          for all i
    """
    p = P.prime
    n = P.ngens

    def nf(pairs):
        vec, _, _ = _collect_core(P, pairs, budget)
        return vec

    def mulv(u, v):
        return nf(_vector_pairs(u) + _vector_pairs(v))

    gen = []
    for i in range(n):
        vec = [0] * n
        vec[i] = 1
        gen.append(tuple(vec))
    gpow = [nf(((i, p),)) for i in range(n)]
    gpow_less = [nf(((i, p - 1),)) for i in range(n)]

    for k in range(n - 1, 1, -1):
        for j in range(k - 1, 0, -1):
            for i in range(j - 1, -1, -1):
                lhs = mulv(gen[k], mulv(gen[j], gen[i]))
                rhs = mulv(mulv(gen[k], gen[j]), gen[i])
                if lhs != rhs:
                    return ConsistencyReport(
                        False, f"g{k + 1}*(g{j + 1}*g{i + 1}) vs (g{k + 1}*g{j + 1})*g{i + 1}", lhs, rhs
                    )
    for j in range(n):
        for i in range(j):
            lhs = mulv(gpow[j], gen[i])
            rhs = mulv(gpow_less[j], mulv(gen[j], gen[i]))
            if lhs != rhs:
                return ConsistencyReport(
                    False, f"g{j + 1}^p*g{i + 1} vs g{j + 1}^(p-1)*(g{j + 1}*g{i + 1})", lhs, rhs
                )
            lhs = mulv(mulv(gen[j], gen[i]), gpow_less[i])
            rhs = mulv(gen[j], gpow[i])
            if lhs != rhs:
                return ConsistencyReport(
                    False, f"(g{j + 1}*g{i + 1})*g{i + 1}^(p-1) vs g{j + 1}*g{i + 1}^p", lhs, rhs
                )
    for i in range(n):
        lhs = mulv(gpow[i], gen[i])
        rhs = mulv(gen[i], gpow[i])
        if lhs != rhs:
            return ConsistencyReport(False, f"g{i + 1}^p*g{i + 1} vs g{i + 1}*g{i + 1}^p", lhs, rhs)
    return ConsistencyReport(True)


# ---------------------------------------------------------------------------
# text format

_HEADER_RE = re.compile(r"^group\b")
_KV_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)")
_POWER_RE = re.compile(r"^g(\d+)\s*\^\s*(p|\d+)\s*=\s*(.*)$")
_COMM_RE = re.compile(r"^\[\s*g(\d+)\s*,\s*g(\d+)\s*\]\s*=\s*(.*)$")
_TERM_RE = re.compile(r"^g(\d+)(?:\^(\d+))?$")
_NAME_RE = re.compile(r"^[A-Za-z0-9_.+\-]+$")


def _parse_word(text, p, n, lineno, col0):
    text = text.strip()
    if not text:
        raise PcParseError("empty word", lineno, col0)
    vec = [0] * n
    if text == "id":
        return tuple(vec)
    last = 0
    for part in text.split("*"):
        m = _TERM_RE.match(part.strip())
        if not m:
            raise PcParseError(f"bad word term {part.strip()!r}", lineno, col0)
        idx = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) else 1
        if not 1 <= idx <= n:
            raise PcParseError(f"generator g{idx} out of range (n={n})", lineno, col0)
        if idx <= last:
            raise PcParseError("word indices must be strictly increasing", lineno, col0)
        if not 1 <= exp < p:
            raise PcParseError(f"word exponent {exp} out of range [1, {p})", lineno, col0)
        vec[idx - 1] = exp
        last = idx
    return tuple(vec)


def parse_presentation(text: str) -> PcPresentation:
    """Parse the line-oriented presentation format.

    Line 1: ``group p=<prime> n=<count> [name=<token>]``; then power rules
    ``g<i>^p = <word>`` and commutator rules ``[g<j>,g<i>] = <word>``, where
    a word is ``id`` or ``g<a>^<e>*g<b>^<e>...``.  ``#`` starts a comment.
    Unstated rules default to ``id``.
    """
    p = n = None
    name = None
    power_rules = None
    comm_rules = {}
    power_seen = set()
    header_done = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        col = raw.index(stripped[0]) + 1
        if not header_done:
            if not _HEADER_RE.match(stripped):
                raise PcParseError("expected 'group p=<prime> n=<count>' header", lineno, col)
            kvs = dict()
            body = stripped[len("group") :]
            consumed = 0
            for m in _KV_RE.finditer(body):
                kvs[m.group(1)] = m.group(2)
                consumed += 1
            extra = _KV_RE.sub("", body).strip()
            if extra:
                raise PcParseError(f"unexpected token {extra.split()[0]!r} in header", lineno, col)
            if "p" not in kvs or "n" not in kvs:
                raise PcParseError("header must define p= and n=", lineno, col)
            try:
                p = int(kvs["p"])
                n = int(kvs["n"])
            except ValueError:
                raise PcParseError("p and n must be integers", lineno, col) from None
            if not is_prime(p):
                raise PcParseError(f"p={p} is not prime", lineno, col)
            if n < 0:
                raise PcParseError("n must be >= 0", lineno, col)
            name = kvs.get("name")
            if name is not None and not _NAME_RE.match(name):
                raise PcParseError(f"bad name token {name!r}", lineno, col)
            unknown = set(kvs) - {"p", "n", "name"}
            if unknown:
                raise PcParseError(f"unknown header key {sorted(unknown)[0]!r}", lineno, col)
            power_rules = [(0,) * n for _ in range(n)]
            header_done = True
            continue
        m = _POWER_RE.match(stripped)
        if m:
            idx = int(m.group(1))
            rel = m.group(2)
            if not 1 <= idx <= n:
                raise PcParseError(f"generator g{idx} out of range (n={n})", lineno, col)
            if rel != "p" and int(rel) != p:
                raise PcParseError(f"relative order {rel} declared; every generator has relative order p={p}", lineno, col)
            if idx in power_seen:
                raise PcParseError(f"duplicate power rule for g{idx}", lineno, col)
            word = _parse_word(m.group(3), p, n, lineno, col)
            if any(e and k + 1 <= idx for k, e in enumerate(word)):
                raise PcParseError(f"power rule for g{idx} must use only generators above g{idx}", lineno, col)
            power_seen.add(idx)
            power_rules[idx - 1] = word
            continue
        m = _COMM_RE.match(stripped)
        if m:
            j, i = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= n and 1 <= j <= n):
                raise PcParseError(f"generator out of range in [g{j},g{i}]", lineno, col)
            if j <= i:
                raise PcParseError(f"commutator [g{j},g{i}] violates the weighting constraint (need j > i)", lineno, col)
            if (j - 1, i - 1) in comm_rules:
                raise PcParseError(f"duplicate commutator rule [g{j},g{i}]", lineno, col)
            word = _parse_word(m.group(3), p, n, lineno, col)
            if any(e and k + 1 <= j for k, e in enumerate(word)):
                raise PcParseError(f"commutator rule [g{j},g{i}] must use only generators above g{j}", lineno, col)
            comm_rules[(j - 1, i - 1)] = word
            continue
        raise PcParseError(f"unrecognized line {stripped!r}", lineno, col)
    if not header_done:
        raise PcParseError("empty source: missing 'group' header", 1, 1)
    try:
        return PcPresentation(p, n, power_rules, comm_rules, name=name)
    except PresentationError as exc:  # defense; parser validates first
        raise PcParseError(str(exc)) from exc


def _word_text(vec) -> str:
    parts = [f"g{g + 1}" + (f"^{e}" if e > 1 else "") for g, e in _vector_pairs(vec)]
    return "*".join(parts) if parts else "id"


def print_presentation(P: PcPresentation) -> str:
    """Canonical source text: rules in index order, trivial rules omitted."""
    head = f"group p={P.prime} n={P.ngens}"
    if P.name:
        head += f" name={P.name}"
    lines = [head]
    for i, v in enumerate(P.power_rules):
        if any(v):
            lines.append(f"g{i + 1}^p = {_word_text(v)}")
    for (j, i) in sorted(P.commutator_rules):
        lines.append(f"[g{j + 1},g{i + 1}] = {_word_text(P.commutator_rules[(j, i)])}")
    return "\n".join(lines) + "\n"


def parse_element(text: str, P: PcPresentation) -> Element:
    """Parse a (not necessarily normal) word like 'g1^3*g2' into an element."""
    text = text.strip()
    if text in ("", "id"):
        return P.identity
    pairs = []
    for part in text.split("*"):
        m = re.match(r"^g(\d+)(?:\^(-?\d+))?$", part.strip())
        if not m:
            raise PcParseError(f"bad word term {part.strip()!r}")
        idx = int(m.group(1))
        if not 1 <= idx <= P.ngens:
            raise PcParseError(f"generator g{idx} out of range (n={P.ngens})")
        pairs.append((idx - 1, int(m.group(2)) if m.group(2) else 1))
    return collect(pairs, P)
