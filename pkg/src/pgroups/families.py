"""Builtin group families and corpus management.

Presentation-backed families encode each cyclic factor C_{p^e} as a chain of
e generators with g_i^p = g_{i+1}, so every relative order is p.  The p = 2
negative-control families (dihedral, quaternion, semidihedral) come from the
handwritten tables in the table module and never touch the collection engine.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import PcParseError, PresentationError
from .pc import PcPresentation, is_prime, parse_presentation
from .table import TableGroup, dihedral_table, quaternion_table, semidihedral_table

FAMILY_NAMES = (
    "cyclic",
    "abelian",
    "elementary_abelian",
    "heisenberg",
    "extraspecial",
    "modular",
    "dihedral",
    "quaternion",
    "semidihedral",
)


@dataclass(frozen=True)
class FamilySpec:
    """Parameters for one builtin family member."""

    family: str
    p: int | None = None
    e: int | None = None
    k: int | None = None
    partition: tuple | None = None
    variant: str | None = None

    def label(self) -> str:
        bits = []
        if self.p is not None:
            bits.append(f"p={self.p}")
        if self.e is not None:
            bits.append(f"e={self.e}")
        if self.k is not None:
            bits.append(f"k={self.k}")
        if self.partition is not None:
            bits.append("type=" + "+".join(str(t) for t in self.partition))
        if self.variant is not None:
            bits.append(f"variant={self.variant}")
        return f"{self.family}({','.join(bits)})"

    def token(self) -> str:
        return (
            self.label()
            .replace("(", "-")
            .replace(")", "")
            .replace(",", "-")
            .replace("=", "")
        )


def _chain_power_rules(p, parts):
    """Power rules for a direct sum of cyclic chains; returns (n, rules, starts)."""
    n = sum(parts)
    rules = [[0] * n for _ in range(n)]
    starts = []
    pos = 0
    for t in parts:
        starts.append(pos)
        for j in range(t - 1):
            rules[pos + j][pos + j + 1] = 1
        pos += t
    return n, [tuple(r) for r in rules], starts


def _cyclic(p, k, name):
    _, rules, _ = _chain_power_rules(p, [k])
    return PcPresentation(p, k, rules, {}, name=name)


def _abelian(p, parts, name):
    n, rules, _ = _chain_power_rules(p, list(parts))
    return PcPresentation(p, n, rules, {}, name=name)


def _heisenberg(p, e, name):
    """<a, b, c | a^(p^e), b^(p^e), c^(p^e), [c,a], [c,b], [b,a]=c> on chains.

    Generator order a1 b1 c1 a2 b2 c2 ...; the derived commutator rules are
    [b_i, a_j] = c_(i+j-1), with the inverse word when the pair order flips.
    """
    n = 3 * e

    def a(i):
        return 3 * (i - 1)

    def b(i):
        return 3 * (i - 1) + 1

    def c(i):
        return 3 * (i - 1) + 2

    rules = [[0] * n for _ in range(n)]
    for i in range(1, e):
        rules[a(i)][a(i + 1)] = 1
        rules[b(i)][b(i + 1)] = 1
        rules[c(i)][c(i + 1)] = 1
    comm = {}
    for i in range(1, e + 1):
        for j in range(1, e + 1):
            k = i + j - 1
            if k > e:
                continue
            hi, lo = b(i), a(j)
            if hi > lo:
                vec = [0] * n
                vec[c(k)] = 1
                comm[(hi, lo)] = tuple(vec)
            else:
                # [a_j, b_i] = [b_i, a_j]^-1 = c^(-p^(k-1)); inverse of a chain
                # element carries digit p-1 from position k to the top
                vec = [0] * n
                for t in range(k, e + 1):
                    vec[c(t)] = p - 1
                comm[(lo, hi)] = tuple(vec)
    return PcPresentation(p, n, [tuple(r) for r in rules], comm, name=name)


def _extraspecial(p, variant, name):
    if variant == "exponent-p":
        comm = {(1, 0): (0, 0, 1)}
        return PcPresentation(p, 3, None, comm, name=name)
    # exponent p^2: a of order p^2 with [b, a] = a^-p
    rules = [(0, 0, 1), (0, 0, 0), (0, 0, 0)]
    comm = {(1, 0): (0, 0, p - 1)}
    return PcPresentation(p, 3, rules, comm, name=name)


def _modular(p, k, name):
    """M_(p^k): a of order p^(k-1), b of order p, a^b = a^(1 + p^(k-2))."""
    n = k
    rules = [[0] * n for _ in range(n)]
    rules[0][2] = 1  # a^p starts the chain g3..gk
    for i in range(2, n - 1):
        rules[i][i + 1] = 1
    comm_word = [0] * n
    comm_word[n - 1] = p - 1  # [b, a] = a^(-p^(k-2))
    comm = {(1, 0): tuple(comm_word)}
    return PcPresentation(p, n, [tuple(r) for r in rules], comm, name=name)


def build_family(spec: FamilySpec):
    """Construct the group for a family spec: a presentation, or a handwritten
    table for the p = 2 control families."""
    fam = spec.family
    name = spec.token()
    if fam == "cyclic":
        p, k = _need_prime(spec), _need_int(spec.k, "k", 1)
        return _cyclic(p, k, name)
    if fam == "abelian":
        p = _need_prime(spec)
        if not spec.partition or any(t < 1 for t in spec.partition):
            raise PresentationError("abelian family needs a partition of positive integers")
        parts = tuple(sorted(spec.partition, reverse=True))
        return _abelian(p, parts, name)
    if fam == "elementary_abelian":
        p, k = _need_prime(spec), _need_int(spec.k, "k", 1)
        return PcPresentation(p, k, None, {}, name=name)
    if fam == "heisenberg":
        p, e = _need_prime(spec), _need_int(spec.e, "e", 1)
        if p == 2:
            raise PresentationError("heisenberg family needs an odd prime")
        return _heisenberg(p, e, name)
    if fam == "extraspecial":
        p = _need_prime(spec)
        if p == 2:
            raise PresentationError("extraspecial family is built for odd primes")
        if spec.variant not in ("exponent-p", "exponent-p2"):
            raise PresentationError("extraspecial variant must be exponent-p or exponent-p2")
        return _extraspecial(p, spec.variant, name)
    if fam == "modular":
        p, k = _need_prime(spec), _need_int(spec.k, "k", 3)
        if p == 2 and k < 4:
            raise PresentationError("modular family with p=2 needs k >= 4")
        return _modular(p, k, name)
    if fam == "dihedral":
        k = _need_int(spec.k, "k", 3)
        return dihedral_table(2 ** k)
    if fam == "quaternion":
        k = _need_int(spec.k, "k", 3)
        return quaternion_table(2 ** k)
    if fam == "semidihedral":
        k = _need_int(spec.k, "k", 4)
        return semidihedral_table(2 ** k)
    raise PresentationError(f"unknown family {fam!r}")


def _need_prime(spec):
    p = spec.p
    if p is None or not is_prime(p):
        raise PresentationError(f"{spec.family} family needs a prime p, got {p!r}")
    return p


def _need_int(value, what, minimum):
    if value is None or value < minimum:
        raise PresentationError(f"parameter {what} must be an integer >= {minimum}, got {value!r}")
    return value


def expected_stats(spec: FamilySpec) -> dict:
    """Advertised (order, exponent, class, d) per family, asserted by the suite."""
    fam, p, e, k = spec.family, spec.p, spec.e, spec.k
    if fam == "cyclic":
        return {"order": p ** k, "exponent": p ** k, "class": 1, "d": 1}
    if fam == "abelian":
        parts = tuple(sorted(spec.partition, reverse=True))
        return {"order": p ** sum(parts), "exponent": p ** parts[0],
                "class": 1, "d": len(parts)}
    if fam == "elementary_abelian":
        return {"order": p ** k, "exponent": p, "class": 1, "d": k}
    if fam == "heisenberg":
        return {"order": p ** (3 * e), "exponent": p ** e, "class": 2, "d": 2}
    if fam == "extraspecial":
        expo = p if spec.variant == "exponent-p" else p ** 2
        return {"order": p ** 3, "exponent": expo, "class": 2, "d": 2}
    if fam == "modular":
        return {"order": p ** k, "exponent": p ** (k - 1), "class": 2, "d": 2}
    if fam in ("dihedral", "quaternion", "semidihedral"):
        return {"order": 2 ** k, "exponent": 2 ** (k - 1), "class": k - 1, "d": 2}
    raise PresentationError(f"unknown family {fam!r}")


def default_corpus() -> list:
    """The default verification corpus: every family represented, every
    predicate with at least one passing and one failing group, orders <= 729."""
    return [
        FamilySpec("cyclic", p=3, k=1),
        FamilySpec("cyclic", p=3, k=4),
        FamilySpec("cyclic", p=5, k=2),
        FamilySpec("abelian", p=3, partition=(2, 1)),
        FamilySpec("abelian", p=3, partition=(2, 2, 2)),
        FamilySpec("elementary_abelian", p=3, k=3),
        FamilySpec("heisenberg", p=3, e=1),
        FamilySpec("heisenberg", p=3, e=2),
        FamilySpec("extraspecial", p=3, variant="exponent-p2"),
        FamilySpec("extraspecial", p=5, variant="exponent-p"),
        FamilySpec("modular", p=3, k=4),
        FamilySpec("modular", p=2, k=4),
        FamilySpec("dihedral", k=3),
        FamilySpec("quaternion", k=3),
        FamilySpec("semidihedral", k=4),
    ]


# ---------------------------------------------------------------------------
# corpus entries and the config format


@dataclass(frozen=True)
class CorpusEntry:
    """One group of a corpus run: a family spec or an included presentation."""

    name: str
    spec: FamilySpec | None = None
    presentation: PcPresentation | None = None
    table: TableGroup | None = None
    expected: dict | None = None

    def describe(self) -> str:
        if self.spec is not None:
            return self.spec.label()
        return f"include:{self.name}"


def entry_for(spec: FamilySpec) -> CorpusEntry:
    built = build_family(spec)
    expected = expected_stats(spec)
    if isinstance(built, TableGroup):
        return CorpusEntry(name=spec.label(), spec=spec, table=built, expected=expected)
    return CorpusEntry(name=spec.label(), spec=spec, presentation=built, expected=expected)


def entry_for_presentation(pres: PcPresentation, name=None) -> CorpusEntry:
    return CorpusEntry(name=name or pres.name or f"group_p{pres.prime}_n{pres.ngens}",
                       presentation=pres)


def default_corpus_entries() -> list:
    return [entry_for(s) for s in default_corpus()]


_INT_KEYS = {"p", "e", "k"}


def parse_corpus_config(text: str, base_dir: str = ".") -> list:
    """Line-oriented corpus config: `family=<name> p=.. e=.. ...` entries and
    `include=<file.pcp>` lines.  Returns CorpusEntry objects in file order."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kvs = {}
        for tok in line.split():
            if "=" not in tok:
                raise PcParseError(f"bad corpus token {tok!r}", lineno)
            key, val = tok.split("=", 1)
            kvs[key] = val
        if "include" in kvs:
            if len(kvs) != 1:
                raise PcParseError("include= lines take no other keys", lineno)
            path = os.path.join(base_dir, kvs["include"])
            with open(path) as fh:
                pres = parse_presentation(fh.read())
            entries.append(entry_for_presentation(pres, name=pres.name or os.path.basename(path)))
            continue
        if "family" not in kvs:
            raise PcParseError("corpus line needs family= or include=", lineno)
        fam = kvs.pop("family")
        kwargs = {}
        for key, val in kvs.items():
            if key in _INT_KEYS:
                kwargs[key] = int(val)
            elif key == "type":
                kwargs["partition"] = tuple(int(t) for t in val.split("+"))
            elif key == "variant":
                kwargs["variant"] = val
            else:
                raise PcParseError(f"unknown corpus key {key!r}", lineno)
        try:
            entries.append(entry_for(FamilySpec(fam, **kwargs)))
        except PresentationError as exc:
            raise PcParseError(str(exc), lineno) from exc
    return entries


def default_corpus_config() -> str:
    lines = ["# default verification corpus"]
    for spec in default_corpus():
        bits = [f"family={spec.family}"]
        if spec.p is not None:
            bits.append(f"p={spec.p}")
        if spec.e is not None:
            bits.append(f"e={spec.e}")
        if spec.k is not None:
            bits.append(f"k={spec.k}")
        if spec.partition is not None:
            bits.append("type=" + "+".join(str(t) for t in spec.partition))
        if spec.variant is not None:
            bits.append(f"variant={spec.variant}")
        lines.append(" ".join(bits))
    return "\n".join(lines) + "\n"
