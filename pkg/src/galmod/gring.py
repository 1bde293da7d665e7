"""Arithmetic in the local ring F_p[t] / <t^(p^n)>.

The ring is isomorphic to the group algebra of a cyclic group of order p^n
over F_p via t = sigma - 1, where sigma is a fixed generator.  Elements are
stored densely in the t-basis because the valuation (the t-adic order) and
all length computations read off directly from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ParamsMismatchError

INF = float("inf")

# An LValue is either a finite valuation in {0, ..., p^n - 1} or INF.
LValue = "int | float"


def _is_odd_prime(m: int) -> bool:
    if m < 3 or m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingParams:
    """The pair (p, n) fixing the ring F_p[t]/<t^(p^n)>."""

    p: int
    n: int

    def __post_init__(self) -> None:
        if not _is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.p ** self.n >= 2 ** 31:
            raise ValueError(f"p^n = {self.p}^{self.n} exceeds the machine-size guard 2^31")

    @property
    def order(self) -> int:
        return self.p ** self.n


@lru_cache(maxsize=None)
def _binomials_mod_p(rows: int, width: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Pascal triangle mod p: entry [j][m] = C(j, m) % p for m < width."""
    out = []
    row = [1] + [0] * (width - 1)
    for _ in range(rows):
        out.append(tuple(row))
        row = [(row[m] + (row[m - 1] if m else 0)) % p for m in range(width)]
    return tuple(out)


@dataclass(frozen=True)
class GroupRingElement:
    """A dense element of F_p[t]/<t^(p^n)>; coefficient k multiplies t^k."""

    params: RingParams
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        N = self.params.order
        if len(self.coeffs) != N:
            raise ValueError(f"expected {N} coefficients, got {len(self.coeffs)}")
        p = self.params.p
        object.__setattr__(self, "coeffs", tuple(int(c) % p for c in self.coeffs))

    @classmethod
    def zero(cls, params: RingParams) -> "GroupRingElement":
        return cls(params, (0,) * params.order)

    @classmethod
    def one(cls, params: RingParams) -> "GroupRingElement":
        return cls(params, (1,) + (0,) * (params.order - 1))

    @classmethod
    def monomial(cls, params: RingParams, k: int, c: int = 1) -> "GroupRingElement":
        """c * t^k."""
        if not 0 <= k < params.order:
            raise ValueError(f"exponent {k} out of range")
        coeffs = [0] * params.order
        coeffs[k] = c
        return cls(params, tuple(coeffs))

    @classmethod
    def sigma(cls, params: RingParams) -> "GroupRingElement":
        """The group generator sigma = 1 + t."""
        coeffs = [0] * params.order
        coeffs[0] = 1
        if params.order > 1:
            coeffs[1] = 1
        return cls(params, tuple(coeffs))

    @classmethod
    def from_sigma_basis(cls, params: RingParams, sigma_coeffs) -> "GroupRingElement":
        """Convert coefficients of 1, sigma, sigma^2, ... to the t-basis."""
        N = params.order
        sigma_coeffs = tuple(int(c) % params.p for c in sigma_coeffs)
        if len(sigma_coeffs) != N:
            raise ValueError(f"expected {N} coefficients, got {len(sigma_coeffs)}")
        binom = _binomials_mod_p(N, N, params.p)
        out = [0] * N
        for k, c in enumerate(sigma_coeffs):
            if c == 0:
                continue
            row = binom[k]
            for m in range(k + 1):
                out[m] = (out[m] + c * row[m]) % params.p
        return cls(params, tuple(out))

    def to_sigma_basis(self) -> tuple[int, ...]:
        """Coefficients of this element written against 1, sigma, sigma^2, ..."""
        N = self.params.order
        p = self.params.p
        binom = _binomials_mod_p(N, N, p)
        out = [0] * N
        # t^m = (sigma - 1)^m = sum_k C(m, k) (-1)^(m-k) sigma^k
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            row = binom[m]
            for k in range(m + 1):
                sign = 1 if (m - k) % 2 == 0 else p - 1
                out[k] = (out[k] + c * row[k] * sign) % p
        return tuple(out)

    def _require_same(self, other: "GroupRingElement") -> None:
        if self.params != other.params:
            raise ParamsMismatchError("elements live in different rings")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._require_same(other)
        p = self.params.p
        return GroupRingElement(
            self.params, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> "GroupRingElement":
        p = self.params.p
        return GroupRingElement(self.params, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.params.p
            return GroupRingElement(self.params, tuple((other * a) % p for a in self.coeffs))
        self._require_same(other)
        N = self.params.order
        p = self.params.p
        out = [0] * N
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(N - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
        return GroupRingElement(self.params, tuple(out))

    def __rmul__(self, other: int) -> "GroupRingElement":
        return self.__mul__(other)

    def __pow__(self, m: int) -> "GroupRingElement":
        if m < 0:
            raise ValueError("negative powers not supported")
        result = GroupRingElement.one(self.params)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self):
        """The t-adic valuation: index of the lowest nonzero coefficient, INF for 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return INF

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0


def valuation(f: GroupRingElement):
    return f.valuation()


def is_unit(f: GroupRingElement) -> bool:
    return f.is_unit()


def lstar(i, j, params: RingParams):
    """The truncated-addition monoid operation on valuations.

    Finite values add as long as the sum stays below p^n; anything larger,
    or any INF operand, is absorbed to INF.
    """
    if i == INF or j == INF:
        return INF
    s = i + j
    return s if s <= params.order - 1 else INF
