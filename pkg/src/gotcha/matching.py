"""Permutations, the mismatch distance, and exact close-permutation counting.

The login tolerance works on the metric
    d_k(p, q) = #{i : p(i) != q(i)}
which is never exactly 1 (fixing k-1 positions of a bijection forces the
last).  The number of permutations within distance alpha of any pivot is

    sum over i in {0, 2, .., alpha} of C(k, i) * D_i

with D_i the derangement numbers -- independent of the pivot.  The looser
closed-form bound 1 + sum_{i=2..alpha} C(k,i) * i! is kept alongside it
because the server's worst-case work is stated in terms of the bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import ValidationError
from .seedcore import RandomStream


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..k}, stored as a 1-based tuple: mapping[i-1] = pi(i)."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        k = len(self.mapping)
        if k == 0:
            raise ValidationError("permutation must have at least one entry")
        if sorted(self.mapping) != list(range(1, k + 1)):
            raise ValidationError(f"not a permutation of 1..{k}: {self.mapping}")

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "Permutation":
        return cls(tuple(int(e) for e in entries))

    @property
    def k(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        """pi(i) for 1-based i."""
        return self.mapping[i - 1]

    def to_list(self) -> list[int]:
        """Wire form: 1-based integer array."""
        return list(self.mapping)


@dataclass(frozen=True)
class MatchingChallenge:
    """k images in canonical order paired with k labels in permuted order.

    The correct answer is the permutation taking label positions back to
    image indices.  Nothing in the challenge object leaks that permutation:
    the label order is exactly what the breached record stores.
    """

    images: tuple
    labels: tuple[str, ...]
    k: int

    def __post_init__(self):
        if len(self.images) != self.k or len(self.labels) != self.k:
            raise ValidationError(
                f"challenge size mismatch: k={self.k}, {len(self.images)} images, {len(self.labels)} labels"
            )


def distance(p1: Permutation, p2: Permutation) -> int:
    """Number of positions where the permutations disagree (0, or 2..k)."""
    if p1.k != p2.k:
        raise ValidationError(f"size mismatch: {p1.k} vs {p2.k}")
    return sum(1 for a, b in zip(p1.mapping, p2.mapping) if a != b)


def derangement_number(n: int) -> int:
    """D_n: permutations of n elements with no fixed point."""
    if n < 0:
        raise ValidationError("derangement index must be non-negative")
    if n == 0:
        return 1
    if n == 1:
        return 0
    prev2, prev1 = 1, 0  # D_0, D_1
    for i in range(2, n + 1):
        prev2, prev1 = prev1, (i - 1) * (prev2 + prev1)
    return prev1


def _check_ball_args(k: int, alpha: int) -> None:
    if k < 1:
        raise ValidationError("k must be at least 1")
    if alpha < 0 or alpha > k:
        raise ValidationError(f"alpha must be in 0..{k}, got {alpha}")


def count_close(k: int, alpha: int) -> int:
    """Exact size of {p' : d_k(p, p') <= alpha}; the same for every pivot p."""
    _check_ball_args(k, alpha)
    return sum(math.comb(k, i) * derangement_number(i) for i in range(0, alpha + 1))


def count_close_upper_bound(k: int, alpha: int) -> int:
    """The 1 + sum C(k,i)*i! bound; always >= count_close(k, alpha)."""
    _check_ball_args(k, alpha)
    return 1 + sum(math.comb(k, i) * math.factorial(i) for i in range(2, alpha + 1))


def _deranged_assignments(values: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Rearrangements of values with no element left in place."""
    for cand in itertools.permutations(values):
        if all(c != v for c, v in zip(cand, values)):
            yield cand


def enumerate_close(pivot: Permutation, alpha: int) -> list[Permutation]:
    """All permutations within distance alpha of pivot, pivot included.

    Generates by choosing the mismatch index set and deranging the pivot's
    values on it, so the work is count_close-sized (13,264 at k=10, alpha=5)
    rather than k!-sized.  Deterministic order, no duplicates.
    """
    k = pivot.k
    _check_ball_args(k, alpha)
    out = [pivot]
    base = list(pivot.mapping)
    for i in range(2, alpha + 1):
        for indices in itertools.combinations(range(k), i):
            values = tuple(base[j] for j in indices)
            for assigned in _deranged_assignments(values):
                entries = base[:]
                for j, v in zip(indices, assigned):
                    entries[j] = v
                out.append(Permutation(tuple(entries)))
    return out


def random_permutation(k: int, stream: RandomStream) -> Permutation:
    """Uniform permutation of 1..k via the back-to-front unbiased shuffle.

    Consumes exactly k-1 draw_uniform calls (moduli k, k-1, .., 2), pinned
    in FORMATS.md so r2 reproduces the same permutation everywhere.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    entries = list(range(1, k + 1))
    for i in range(k - 1, 0, -1):
        j = stream.draw_uniform(i + 1)
        entries[i], entries[j] = entries[j], entries[i]
    return Permutation(tuple(entries))
