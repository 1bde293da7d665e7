"""Finite modules over F_p[t]/<t^(p^n)> presented as direct sums of cyclic blocks.

A block of length l is the quotient by t^l; the module length of an element
is the number of times t can act before the element dies, which equals the
F_p-dimension of the cyclic submodule it generates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GuardError, ParamsMismatchError
from .gring import GroupRingElement, RingParams
from . import linalg

CYCLIC_ENUM_GUARD = 10 ** 7


@dataclass(frozen=True)
class ModuleShape:
    """An ordered list of cyclic block lengths over a fixed ring."""

    params: RingParams
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        N = self.params.order
        for b in self.blocks:
            if not 1 <= b <= N:
                raise ValueError(f"block length {b} outside [1, {N}]")
        if sum(self.blocks) < 1:
            raise ValueError("a module shape needs at least one block")

    @property
    def dim(self) -> int:
        return sum(self.blocks)

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, tuple((0,) * b for b in self.blocks))

    def generator(self, block: int) -> "ModuleElement":
        """The canonical generator 1 of the given block."""
        vecs = [[0] * b for b in self.blocks]
        vecs[block][0] = 1
        return ModuleElement(self, tuple(tuple(v) for v in vecs))

    def element(self, vectors) -> "ModuleElement":
        return ModuleElement(self, tuple(tuple(v) for v in vectors))

    def element_from_flat(self, flat) -> "ModuleElement":
        vecs = []
        pos = 0
        for b in self.blocks:
            vecs.append(tuple(flat[pos:pos + b]))
            pos += b
        return ModuleElement(self, tuple(vecs))

    def elements(self):
        """All p^dim elements, in deterministic lexicographic order."""
        p = self.params.p
        for flat in itertools.product(range(p), repeat=self.dim):
            yield self.element_from_flat(flat)


@dataclass(frozen=True)
class ModuleElement:
    shape: ModuleShape
    vectors: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.vectors) != len(self.shape.blocks):
            raise ValueError("wrong number of block vectors")
        p = self.shape.params.p
        fixed = []
        for vec, b in zip(self.vectors, self.shape.blocks):
            if len(vec) != b:
                raise ValueError("block vector length does not match shape")
            fixed.append(tuple(int(c) % p for c in vec))
        object.__setattr__(self, "vectors", tuple(fixed))

    def flat(self) -> tuple[int, ...]:
        return tuple(c for vec in self.vectors for c in vec)

    def _require_same(self, other: "ModuleElement") -> None:
        if self.shape != other.shape:
            raise ParamsMismatchError("elements live in different modules")

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        self._require_same(other)
        p = self.shape.params.p
        return ModuleElement(
            self.shape,
            tuple(
                tuple((a + b) % p for a, b in zip(u, v))
                for u, v in zip(self.vectors, other.vectors)
            ),
        )

    def __neg__(self) -> "ModuleElement":
        p = self.shape.params.p
        return ModuleElement(self.shape, tuple(tuple((-a) % p for a in u) for u in self.vectors))

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + (-other)

    def __rmul__(self, c: int) -> "ModuleElement":
        p = self.shape.params.p
        return ModuleElement(self.shape, tuple(tuple((c * a) % p for a in u) for u in self.vectors))

    def is_zero(self) -> bool:
        return all(all(c == 0 for c in u) for u in self.vectors)

    def length(self) -> int:
        """Smallest k >= 0 with t^k killing the element; dim of the cyclic submodule."""
        best = 0
        for vec, b in zip(self.vectors, self.shape.blocks):
            for i, c in enumerate(vec):
                if c:
                    best = max(best, b - i)
                    break
        return best


def act(f: GroupRingElement, m: ModuleElement) -> ModuleElement:
    """Blockwise truncated multiplication by a ring element."""
    if f.params != m.shape.params:
        raise ParamsMismatchError("ring element and module element disagree on (p, n)")
    p = f.params.p
    out = []
    for vec, b in zip(m.vectors, m.shape.blocks):
        new = [0] * b
        for i, a in enumerate(f.coeffs[:b]):
            if a == 0:
                continue
            for j in range(b - i):
                if vec[j]:
                    new[i + j] = (new[i + j] + a * vec[j]) % p
        out.append(tuple(new))
    return ModuleElement(m.shape, tuple(out))


def act_t(m: ModuleElement, k: int = 1) -> ModuleElement:
    """Fast path for multiplication by t^k (a shift in every block)."""
    out = []
    for vec, b in zip(m.vectors, m.shape.blocks):
        shifted = (0,) * min(k, b) + vec[: max(b - k, 0)]
        out.append(shifted)
    return ModuleElement(m.shape, tuple(out))


def length(m: ModuleElement) -> int:
    return m.length()


def cyclic_dimension(m: ModuleElement) -> int:
    return m.length()


def cyclic_elements(m: ModuleElement, guard: int = CYCLIC_ENUM_GUARD) -> list[ModuleElement]:
    """All elements of the cyclic submodule generated by m."""
    L = m.length()
    p = m.shape.params.p
    if p ** L > guard:
        raise GuardError(f"cyclic submodule has {p}^{L} elements, above the guard {guard}")
    powers = []
    cur = m
    for _ in range(L):
        powers.append(cur)
        cur = act_t(cur)
    out = []
    for coeffs in itertools.product(range(p), repeat=L):
        acc = m.shape.zero()
        for c, v in zip(coeffs, powers):
            if c:
                acc = acc + c * v
        out.append(acc)
    return out


@dataclass(frozen=True)
class NilpotentAction:
    """A square matrix over F_p representing the action of t on some module."""

    params: RingParams
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.int64) % self.params.p
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("action matrix must be square")
        object.__setattr__(self, "matrix", m)
        power = np.eye(m.shape[0], dtype=np.int64)
        for _ in range(self.params.order):
            power = (power @ m) % self.params.p
        if np.any(power):
            raise ValueError(f"matrix is not nilpotent of order dividing {self.params.order}")

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def decompose(action: NilpotentAction) -> tuple[int, ...]:
    """Block lengths of the module defined by a nilpotent t-action.

    The multiplicity of the length-l block is r_(l-1) - 2 r_l + r_(l+1)
    where r_k is the rank of the k-th power of the action matrix.
    Returned sorted in descending order.
    """
    p = action.params.p
    N = action.params.order
    d = action.dim
    ranks = [d]
    power = np.eye(d, dtype=np.int64)
    for _ in range(N + 1):
        power = (power @ action.matrix) % p
        ranks.append(linalg.rank(power, p))
    blocks = []
    for l in range(1, N + 1):
        mult = ranks[l - 1] - 2 * ranks[l] + ranks[l + 1]
        blocks.extend([l] * mult)
    result = tuple(sorted(blocks, reverse=True))
    if sum(result) != d:
        raise AssertionError("rank profile inconsistent with dimension")
    return result
