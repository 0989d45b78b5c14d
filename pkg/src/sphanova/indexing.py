"""Index sets ``u`` and parity vectors ``xi`` with 1-based coordinate labels."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class IndexSet:
    """Sorted subset of ``{1, ..., d+1}``."""

    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        m = tuple(sorted(set(int(i) for i in self.members)))
        if any(i < 1 for i in m):
            raise ValueError("coordinate labels start at 1")
        object.__setattr__(self, "members", m)

    @classmethod
    def of(cls, *members: int) -> "IndexSet":
        return cls(tuple(members))

    @classmethod
    def parse(cls, text: str) -> "IndexSet":
        """Inverse of :attr:`label`, e.g. ``"{1,2}"`` or ``"{}"``."""
        body = text.strip()
        if not re.fullmatch(r"\{\s*(\d+\s*(,\s*\d+\s*)*)?\}", body):
            raise ValueError(f"not an index set: {text!r}")
        nums = re.findall(r"\d+", body)
        return cls(tuple(int(n) for n in nums))

    @property
    def label(self) -> str:
        return "{" + ",".join(str(i) for i in self.members) + "}"

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i: object) -> bool:
        return i in self.members

    def __str__(self) -> str:
        return self.label

    def issubset(self, other: "IndexSet") -> bool:
        return set(self.members) <= set(other.members)

    def check(self, d: int) -> None:
        if self.members and self.members[-1] > d + 1:
            raise ValueError(f"index set {self.label} exceeds ambient dimension {d + 1}")

    def admissible(self, d: int) -> bool:
        """Membership in the admissible family: every subset except size ``d``."""
        self.check(d)
        return len(self) != d

    def subsets(self, proper: bool = False) -> list["IndexSet"]:
        out = []
        for r in range(len(self) + 1):
            for c in itertools.combinations(self.members, r):
                if proper and r == len(self):
                    continue
                out.append(IndexSet(c))
        return out


@dataclass(frozen=True, order=True)
class ParityVector:
    """Bits ``xi`` in ``{0, 1}^(d+1)``; 1 marks oddness in that coordinate."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        b = tuple(int(v) for v in self.bits)
        if any(v not in (0, 1) for v in b):
            raise ValueError("parity bits must be 0 or 1")
        if not b:
            raise ValueError("parity vector must have length d+1 >= 2")
        object.__setattr__(self, "bits", b)

    @classmethod
    def zeros(cls, d: int) -> "ParityVector":
        return cls((0,) * (d + 1))

    @classmethod
    def from_support(cls, d: int, odd: Iterable[int]) -> "ParityVector":
        odd = set(odd)
        return cls(tuple(1 if i in odd else 0 for i in range(1, d + 2)))

    @property
    def dim(self) -> int:
        return len(self.bits) - 1

    @property
    def support(self) -> IndexSet:
        return IndexSet(tuple(i + 1 for i, v in enumerate(self.bits) if v))

    def restrict(self, u: IndexSet) -> tuple[int, ...]:
        return tuple(self.bits[i - 1] for i in u)

    def sign(self, k) -> float:
        """``prod k_i^xi_i`` for a sign vector ``k``."""
        s = 1.0
        for ki, xi in zip(k, self.bits):
            if xi:
                s *= ki
        return s

    def __str__(self) -> str:
        return "".join(str(v) for v in self.bits)


@dataclass(frozen=True)
class TermIndex:
    """A spherical ANOVA term label ``(u, xi)`` with ``supp(xi)`` inside ``u``."""

    u: IndexSet
    xi: ParityVector

    def __post_init__(self) -> None:
        if not self.xi.support.issubset(self.u):
            raise ValueError(f"parity {self.xi} not supported in {self.u.label}")
        self.u.check(self.xi.dim)

    @property
    def d(self) -> int:
        return self.xi.dim

    @property
    def order(self) -> int:
        return len(self.u)

    @property
    def xi_u(self) -> tuple[int, ...]:
        return self.xi.restrict(self.u)

    def sort_key(self) -> tuple:
        return (len(self.u), self.u.members, self.xi_u)

    def omitted(self) -> bool:
        """True if the term depends evenly on the last coordinate."""
        last = self.d + 1
        return last in self.u and self.xi.bits[last - 1] == 0

    def __lt__(self, other: "TermIndex") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.u.label}:{''.join(map(str, self.xi_u))}"
