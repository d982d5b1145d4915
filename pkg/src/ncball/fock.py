"""Words over n letters and the truncated full Fock space.

A word is a tuple of letters in 1..n; the empty tuple is the identity word.
The truncated Fock space of degree m has orthonormal basis e_w for |w| <= m,
ordered by length and then lexicographically. Operators on E (x) F^2_m are
stored with the coefficient space as the slow index, matching np.kron(A, X).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

Word = tuple[int, ...]
EMPTY: Word = ()


def reverse(w: Word) -> Word:
    return tuple(reversed(w))


def fock_dim(n: int, m: int) -> int:
    if n == 1:
        return m + 1
    return (n ** (m + 1) - 1) // (n - 1)


def check_word(w: Word, n: int) -> Word:
    w = tuple(int(a) for a in w)
    if any(a < 1 or a > n for a in w):
        raise ValueError(f"word {w} has letters outside 1..{n}")
    return w


@dataclass(frozen=True)
class FockBasis:
    n: int
    m: int
    words: tuple[Word, ...] = field(init=False, repr=False)
    index: dict[Word, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        words = [w for k in range(self.m + 1)
                 for w in itertools.product(range(1, self.n + 1), repeat=k)]
        object.__setattr__(self, "words", tuple(words))
        object.__setattr__(self, "index", {w: i for i, w in enumerate(words)})

    @property
    def dim(self) -> int:
        return len(self.words)

    def dim_upto(self, d: int) -> int:
        """Number of basis words of length <= d; they come first in graded order."""
        if d < 0:
            return 0
        return fock_dim(self.n, min(d, self.m))

    @cached_property
    def flip(self) -> np.ndarray:
        """Permutation unitary e_w -> e_{reverse(w)}; it conjugates S_i into R_i."""
        U = np.zeros((self.dim, self.dim))
        for j, w in enumerate(self.words):
            U[self.index[reverse(w)], j] = 1.0
        return U

    def creation(self, i: int, side: str = "left") -> np.ndarray:
        return creation_matrix(self, i, side)

    def creation_tuple(self, side: str = "left", r: float = 1.0) -> list[np.ndarray]:
        return [r * creation_matrix(self, i, side) for i in range(1, self.n + 1)]


def enumerate_words(n: int, m: int) -> FockBasis:
    return FockBasis(n, m)


def creation_matrix(basis: FockBasis, i: int, side: str = "left") -> np.ndarray:
    """Truncated left (e_w -> e_{iw}) or right (e_w -> e_{wi}) creation operator."""
    if not 1 <= i <= basis.n:
        raise IndexError(f"letter {i} outside 1..{basis.n}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    S = np.zeros((basis.dim, basis.dim))
    for j, w in enumerate(basis.words):
        if len(w) < basis.m:
            target = (i,) + w if side == "left" else w + (i,)
            S[basis.index[target], j] = 1.0
    return S


def compress(M: np.ndarray, basis: FockBasis, d: int) -> np.ndarray:
    """Compression of M, acting on E (x) F^2_m -> Y (x) F^2_m, to E (x) P^(d).

    The coefficient dimensions are read off from the shape of M.
    """
    if not 0 <= d <= basis.m:
        raise ValueError(f"compression degree {d} outside 0..{basis.m}")
    rows, cols = M.shape
    if rows % basis.dim or cols % basis.dim:
        raise ValueError(f"shape {M.shape} is not a multiple of the Fock dimension {basis.dim}")
    keep = basis.dim_upto(d)
    y, e = rows // basis.dim, cols // basis.dim
    R = M.reshape(y, basis.dim, e, basis.dim)[:, :keep, :, :keep]
    return R.reshape(y * keep, e * keep)


def vacuum_block(M: np.ndarray, basis: FockBasis) -> np.ndarray:
    return compress(M, basis, 0)
