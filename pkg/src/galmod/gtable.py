"""Finite groups given by explicit multiplication tables.

The table carrier is what the cohomology layer computes against; it also
provides a generic, structure-blind fingerprint used to cross-check the
structural one computed for the extension groups.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError

ASSOC_EXHAUSTIVE_GUARD = 200
ASSOC_SAMPLES = 100_000


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    table: np.ndarray
    identity: int
    name: str = field(default="")

    def __post_init__(self) -> None:
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("multiplication table must be square")
        N = t.shape[0]
        if np.any(t < 0) or np.any(t >= N):
            raise ValueError("table entries must be element labels")
        object.__setattr__(self, "table", t)
        e = self.identity
        if np.any(t[e] != np.arange(N)) or np.any(t[:, e] != np.arange(N)):
            raise ValueError("claimed identity is not an identity")
        for a in range(N):
            if e not in t[a]:
                raise ValueError(f"element {a} has no inverse")
        self._check_associativity()

    def _check_associativity(self) -> None:
        t = self.table
        N = t.shape[0]
        if N <= ASSOC_EXHAUSTIVE_GUARD:
            lhs = t[t, :]          # lhs[a,b,c] = (ab)c
            rhs = t[:, t]          # rhs[a,b,c] = a(bc)
            if not np.array_equal(lhs, rhs):
                raise ValueError("table is not associative")
        else:
            rng = random.Random(0)
            for _ in range(ASSOC_SAMPLES):
                a = rng.randrange(N); b = rng.randrange(N); c = rng.randrange(N)
                if t[t[a, b], c] != t[a, t[b, c]]:
                    raise ValueError("table is not associative")

    @property
    def size(self) -> int:
        return int(self.table.shape[0])

    def inv(self, a: int) -> int:
        return int(np.nonzero(self.table[a] == self.identity)[0][0])

    def element_order(self, a: int) -> int:
        o = 1
        cur = a
        while cur != self.identity:
            cur = int(self.table[cur, a])
            o += 1
        return o

    def order_census(self) -> tuple[tuple[int, int], ...]:
        census: dict[int, int] = {}
        for a in range(self.size):
            o = self.element_order(a)
            census[o] = census.get(o, 0) + 1
        return tuple(sorted(census.items()))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center_size(self) -> int:
        t = self.table
        return int(np.sum(np.all(t == t.T, axis=1)))

    def derived_size(self) -> int:
        t = self.table
        N = self.size
        invs = [self.inv(a) for a in range(N)]
        comms = {
            int(t[t[a, b], t[invs[a], invs[b]]])
            for a in range(N) for b in range(N)
        }
        # closure under multiplication
        current = set(comms) | {self.identity}
        while True:
            new = {int(t[a, b]) for a in current for b in current}
            if new <= current:
                return len(current)
            current |= new

    def fingerprint(self):
        from .extgroup import GroupFingerprint

        census = self.order_census()
        return GroupFingerprint(
            order=self.size,
            abelian=self.is_abelian(),
            exponent=max(o for o, _ in census),
            order_census=census,
            center_size=self.center_size(),
            derived_size=self.derived_size(),
        )

    def relabeled(self, perm) -> "FiniteGroupTable":
        """The same group with elements renamed by the given bijection."""
        perm = np.asarray(perm, dtype=np.int64)
        N = self.size
        inv_perm = np.empty(N, dtype=np.int64)
        inv_perm[perm] = np.arange(N)
        new = np.empty_like(self.table)
        for a in range(N):
            for b in range(N):
                new[perm[a], perm[b]] = perm[self.table[a, b]]
        return FiniteGroupTable(new, int(perm[self.identity]), name=self.name)


def cyclic_group(m: int) -> FiniteGroupTable:
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return FiniteGroupTable(table, 0, name=f"Z/{m}")


def elementary_abelian(p: int, k: int, guard: int = 10 ** 4) -> FiniteGroupTable:
    """(Z/p)^k with label = sum of digit_i * p^i (digit 0 varies fastest)."""
    size = p ** k
    if size > guard:
        raise GuardError(f"group has {size} elements, above the guard {guard}")
    coords = np.empty((size, k), dtype=np.int64)
    tmp = np.arange(size)
    for i in range(k):
        coords[:, i] = tmp % p
        tmp = tmp // p
    weights = p ** np.arange(k)
    table = np.empty((size, size), dtype=np.int64)
    for a in range(size):
        table[a] = ((coords[a][None, :] + coords) % p) @ weights
    return FiniteGroupTable(table, 0, name=f"(Z/{p})^{k}")


def ea_coords(label: int, p: int, k: int) -> tuple[int, ...]:
    """Digits of an elementary-abelian label, least significant first."""
    out = []
    for _ in range(k):
        out.append(label % p)
        label //= p
    return tuple(out)


def ea_label(coords, p: int) -> int:
    out = 0
    for i, c in enumerate(coords):
        out += (int(c) % p) * p ** i
    return out


def from_ext_group(G, guard: int = 10 ** 4):
    """Convert an extension group to a table; returns (table, element list)."""
    from . import extgroup

    elems, _, table = extgroup.multiplication_table(G, guard)
    name = f"A_{G.ell} {'x|' if G.flavor is extgroup.ExtFlavor.SPLIT else '*'} Z/{G.params.order}"
    return FiniteGroupTable(table, 0, name=name), elems
