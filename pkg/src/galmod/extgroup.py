"""The two finite extensions of a cyclic p-group by a cyclic block module.

Elements are pairs (f, sigma^j) with f a length-ell coefficient vector in the
t-basis and j an exponent mod p^n.  The split product twists the second
factor by sigma^j; the nonsplit ("bullet") product additionally adds the
socle element t^(ell-1) whenever the exponent sum carries past p^n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import GuardError, ParamsMismatchError
from .gring import RingParams, _binomials_mod_p
from . import linalg

FINGERPRINT_GUARD = 10 ** 6
CENSUS_GUARD = 3 ** 5

NAMED_GROUPS = ("H_p3", "M_p3", "M_pn", "ZpxZp", "Zp2")


class ExtFlavor(Enum):
    SPLIT = "split"
    BULLET = "bullet"


@dataclass(frozen=True)
class ExtGroup:
    params: RingParams
    ell: int
    flavor: ExtFlavor

    def __post_init__(self) -> None:
        N = self.params.order
        if not 1 <= self.ell <= N:
            raise ValueError(f"block length {self.ell} outside [1, {N}]")
        if self.flavor is ExtFlavor.BULLET and self.ell >= N:
            raise ValueError("the nonsplit extension only exists for ell < p^n")

    @property
    def order(self) -> int:
        return self.params.p ** (self.ell + self.params.n)


@dataclass(frozen=True)
class ExtElement:
    f: tuple[int, ...]
    j: int


@lru_cache(maxsize=None)
def _sigma_rows(p: int, pn: int, ell: int) -> tuple[tuple[int, ...], ...]:
    # row j holds C(j, d) mod p for d < ell, the t-expansion of sigma^j
    return _binomials_mod_p(pn, ell, p)


def element(G: ExtGroup, f, j: int) -> ExtElement:
    p = G.params.p
    f = tuple(int(c) % p for c in f)
    if len(f) != G.ell:
        raise ValueError(f"expected {G.ell} coefficients")
    return ExtElement(f, int(j) % G.params.order)


def identity(G: ExtGroup) -> ExtElement:
    return ExtElement((0,) * G.ell, 0)


def _apply_sigma(G: ExtGroup, j: int, f: tuple[int, ...]) -> tuple[int, ...]:
    p = G.params.p
    row = _sigma_rows(p, G.params.order, G.ell)[j]
    out = [0] * G.ell
    for k, c in enumerate(f):
        if c == 0:
            continue
        for d in range(G.ell - k):
            if row[d]:
                out[k + d] = (out[k + d] + c * row[d]) % p
    return tuple(out)


def mul(G: ExtGroup, a: ExtElement, b: ExtElement) -> ExtElement:
    if len(a.f) != G.ell or len(b.f) != G.ell:
        raise ParamsMismatchError("element does not belong to this group")
    p = G.params.p
    N = G.params.order
    twisted = _apply_sigma(G, a.j, b.f)
    f = [(x + y) % p for x, y in zip(a.f, twisted)]
    # the carry test uses the integer sum of representatives in [0, p^n)
    if G.flavor is ExtFlavor.BULLET and a.j + b.j >= N:
        f[G.ell - 1] = (f[G.ell - 1] + 1) % p
    return ExtElement(tuple(f), (a.j + b.j) % N)


def inverse(G: ExtGroup, a: ExtElement) -> ExtElement:
    if G.flavor is ExtFlavor.SPLIT:
        N = G.params.order
        jinv = (-a.j) % N
        p = G.params.p
        neg = tuple((-c) % p for c in a.f)
        return ExtElement(_apply_sigma(G, jinv, neg), jinv)
    # bounded search through the power chain; element orders divide |G|
    e = identity(G)
    prev = a
    cur = mul(G, a, a)
    steps = 1
    while cur != e:
        prev, cur = cur, mul(G, cur, a)
        steps += 1
        if steps > G.order:
            raise AssertionError("power chain exceeded the group order")
    return prev


def power(G: ExtGroup, a: ExtElement, m: int) -> ExtElement:
    """m-fold product, computed by binary exponentiation."""
    if m < 0:
        raise ValueError("exponent must be >= 0")
    result = identity(G)
    base = a
    while m:
        if m & 1:
            result = mul(G, result, base)
        base = mul(G, base, base)
        m >>= 1
    return result


def element_order(G: ExtGroup, a: ExtElement) -> int:
    o = 1
    cur = a
    e = identity(G)
    while cur != e:
        cur = power(G, cur, G.params.p)
        o *= G.params.p
    return o


def commutator(G: ExtGroup, a: ExtElement, b: ExtElement) -> ExtElement:
    return mul(G, mul(G, a, b), inverse(G, mul(G, b, a)))


def carry(j: int, m: int, params: RingParams) -> int:
    """Number of exponent carries accumulated over m successive products.

    Defined recursively: no carry at m = 1, and a step adds one exactly when
    the reduced multiple of j plus j reaches p^n.  For 0 <= j < p^n this
    equals floor(m*j / p^n).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    N = params.order
    c = 0
    for i in range(1, m):
        if (i * j) % N + j >= N:
            c += 1
    return c


def elements(G: ExtGroup):
    """All elements in deterministic lexicographic order (f slow, j fast)."""
    p = G.params.p
    for f in itertools.product(range(p), repeat=G.ell):
        for j in range(G.params.order):
            yield ExtElement(f, j)


def multiplication_table(G: ExtGroup, guard: int = FINGERPRINT_GUARD):
    """Dense multiplication table; returns (elements, index map, table)."""
    size = G.order
    if size > guard:
        raise GuardError(f"group has {size} elements, above the guard {guard}")
    elems = list(elements(G))
    index = {g: i for i, g in enumerate(elems)}
    table = np.empty((size, size), dtype=np.int64)
    for i, a in enumerate(elems):
        for k, b in enumerate(elems):
            table[i, k] = index[mul(G, a, b)]
    return elems, index, table


@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    abelian: bool
    exponent: int
    order_census: tuple[tuple[int, int], ...]
    center_size: int
    derived_size: int


def _generators(G: ExtGroup) -> list[ExtElement]:
    gen_f = ExtElement((1,) + (0,) * (G.ell - 1), 0)
    gen_s = ExtElement((0,) * G.ell, 1)
    return [gen_f, gen_s]


def _derived_subgroup_size(G: ExtGroup) -> int:
    # The derived subgroup lies in the abelian normal part {(f, 0)}, so it is
    # an F_p-span; close the span of generator commutators under conjugation.
    gens = _generators(G)
    seed = []
    for a in gens:
        for b in gens:
            c = commutator(G, a, b)
            if c.j != 0:
                raise AssertionError("generator commutator escaped the kernel part")
            seed.append(c.f)
    basis = [row for row in linalg.row_echelon(np.array(seed + [[0] * G.ell]), G.params.p)[0]
             if np.any(row)]
    if not basis:
        return 1
    while True:
        extended = list(basis)
        for row in basis:
            g = ExtElement(tuple(int(x) for x in row), 0)
            for s in gens:
                conj = mul(G, mul(G, s, g), inverse(G, s))
                extended.append(np.array(conj.f, dtype=np.int64))
        ech, piv = linalg.row_echelon(np.array(extended), G.params.p)
        new_basis = [ech[r] for r in range(len(piv))]
        if len(new_basis) == len(basis):
            return G.params.p ** len(basis)
        basis = new_basis


def fingerprint(G: ExtGroup, guard: int = FINGERPRINT_GUARD) -> GroupFingerprint:
    """Isomorphism-grade invariants gathered by enumerating the group."""
    size = G.order
    if size > guard:
        raise GuardError(f"group has {size} elements, above the guard {guard}")
    gens = _generators(G)
    abelian = all(
        mul(G, a, b) == mul(G, b, a) for a in gens for b in gens
    )
    census: dict[int, int] = {}
    exponent = 1
    for g in elements(G):
        o = element_order(G, g)
        census[o] = census.get(o, 0) + 1
        exponent = max(exponent, o)
    center = sum(
        1 for g in elements(G) if all(mul(G, g, s) == mul(G, s, g) for s in gens)
    )
    return GroupFingerprint(
        order=size,
        abelian=abelian,
        exponent=exponent,
        order_census=tuple(sorted(census.items())),
        center_size=center,
        derived_size=_derived_subgroup_size(G),
    )


def is_named(G: ExtGroup, name: str, guard: int = FINGERPRINT_GUARD) -> bool:
    """Match against a small catalogue of profiles (order, exponent, commutativity).

    "M_pn" additionally demands an element of index p in the order, the
    profile that pins down the unique nonabelian group with a cyclic subgroup
    of index p for odd p.
    """
    if name not in NAMED_GROUPS:
        raise ValueError(f"unknown profile {name!r}; expected one of {NAMED_GROUPS}")
    fp = fingerprint(G, guard)
    p = G.params.p
    if name == "H_p3":
        return fp.order == p ** 3 and not fp.abelian and fp.exponent == p
    if name == "M_p3":
        return fp.order == p ** 3 and not fp.abelian and fp.exponent == p ** 2
    if name == "M_pn":
        return fp.order >= p ** 3 and not fp.abelian and fp.exponent * p == fp.order
    if name == "ZpxZp":
        return fp.order == p ** 2 and fp.abelian and fp.exponent == p
    if name == "Zp2":
        return fp.order == p ** 2 and fp.abelian and fp.exponent == p ** 2
    raise AssertionError("unreachable")


def elem_abelian_normal_with_cyclic_quotient(
    G: ExtGroup, guard: int = CENSUS_GUARD
) -> list[frozenset[ExtElement]]:
    """All elementary abelian normal subgroups of order p^ell with cyclic quotient.

    Exhaustive: candidate subgroups are built as spans of commuting order-p
    elements inside the set of p-torsion elements, then filtered by normality
    and by the quotient having an element of full order p^n.
    """
    size = G.order
    if size > guard:
        raise GuardError(f"group has {size} elements, above the guard {guard}")
    p = G.params.p
    n = G.params.n
    e = identity(G)
    elems = list(elements(G))
    omega1 = [g for g in elems if power(G, g, p) == e]
    gens = _generators(G)

    target = p ** G.ell
    level: set[frozenset[ExtElement]] = {frozenset([e])}
    current_order = 1
    while current_order < target:
        nxt: set[frozenset[ExtElement]] = set()
        for H in level:
            for g in omega1:
                if g in H:
                    continue
                if any(mul(G, g, h) != mul(G, h, g) for h in H):
                    continue
                span = set()
                for h in H:
                    acc = h
                    span.add(acc)
                    for _ in range(p - 1):
                        acc = mul(G, acc, g)
                        span.add(acc)
                if len(span) == current_order * p:
                    nxt.add(frozenset(span))
        level = nxt
        current_order *= p

    out = []
    full = p ** (n - 1)
    for H in sorted(level, key=lambda s: sorted((g.f, g.j) for g in s)):
        normal = all(mul(G, mul(G, s, h), inverse(G, s)) in H for s in gens for h in H)
        if not normal:
            continue
        cyclic_q = any(power(G, g, full) not in H for g in elems)
        if cyclic_q:
            out.append(H)
    return out
