"""Free power series sum_w A_w (x) X_w with matrix coefficients.

A series is a polynomial in n noncommuting variables capped at ``max_degree``;
products and inverses are truncated at that cap. Evaluating at a tuple that is
nilpotent of order <= cap + 1 is therefore an exact algebra morphism.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .fock import EMPTY, FockBasis, Word, check_word
from .linalg import adj, op_norm

OperatorTuple = Sequence[np.ndarray]


class TruncationError(ValueError):
    """Raised when a truncated series is evaluated where truncation is unsound."""


def _word_key(w: Word):
    return (len(w), w)


@dataclass(frozen=True, eq=False)
class FreeSeries:
    n: int
    max_degree: int
    rows: int
    cols: int
    coeffs: Mapping[Word, np.ndarray]

    def __post_init__(self):
        if self.n < 1 or self.max_degree < 0:
            raise ValueError("need n >= 1 and max_degree >= 0")
        clean = {}
        for w, A in self.coeffs.items():
            w = check_word(w, self.n)
            if len(w) > self.max_degree:
                raise ValueError(f"word {w} exceeds max_degree {self.max_degree}")
            A = np.asarray(A, dtype=complex)
            if A.shape != (self.rows, self.cols):
                raise ValueError(f"coefficient at {w} has shape {A.shape}, expected {(self.rows, self.cols)}")
            if np.any(A != 0):
                clean[w] = A
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), key=lambda kv: _word_key(kv[0]))))

    # construction

    @classmethod
    def zero(cls, n: int, m: int, rows: int, cols: int) -> FreeSeries:
        return cls(n, m, rows, cols, {})

    @classmethod
    def constant(cls, n: int, m: int, A) -> FreeSeries:
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        return cls(n, m, A.shape[0], A.shape[1], {EMPTY: A})

    @classmethod
    def identity(cls, n: int, m: int, dim: int) -> FreeSeries:
        return cls.constant(n, m, np.eye(dim))

    @classmethod
    def monomial(cls, n: int, m: int, word: Word, A) -> FreeSeries:
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        return cls(n, m, A.shape[0], A.shape[1], {tuple(word): A})

    @classmethod
    def from_terms(cls, n: int, m: int, terms: Mapping[Word, object]) -> FreeSeries:
        terms = {tuple(w): np.atleast_2d(np.asarray(A, dtype=complex)) for w, A in terms.items()}
        rows, cols = next(iter(terms.values())).shape
        return cls(n, m, rows, cols, terms)

    # access

    def coeff(self, w: Word) -> np.ndarray:
        A = self.coeffs.get(tuple(w))
        return np.zeros((self.rows, self.cols), dtype=complex) if A is None else A

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def words(self) -> list[Word]:
        return list(self.coeffs)

    def truncate(self, d: int) -> FreeSeries:
        d = min(d, self.max_degree)
        return FreeSeries(self.n, d, self.rows, self.cols,
                          {w: A for w, A in self.coeffs.items() if len(w) <= d})

    def with_cap(self, m: int) -> FreeSeries:
        kept = {w: A for w, A in self.coeffs.items() if len(w) <= m}
        return FreeSeries(self.n, m, self.rows, self.cols, kept)

    def map_coeffs(self, fn, rows: int | None = None, cols: int | None = None) -> FreeSeries:
        new = {w: fn(A) for w, A in self.coeffs.items()}
        if rows is None or cols is None:
            probe = fn(np.zeros((self.rows, self.cols), dtype=complex))
            rows, cols = probe.shape
        return FreeSeries(self.n, self.max_degree, rows, cols, new)

    def lmul(self, A) -> FreeSeries:
        """Constant left factor: coefficients A @ A_w."""
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        return self.map_coeffs(lambda C: A @ C, A.shape[0], self.cols)

    def rmul(self, B) -> FreeSeries:
        B = np.atleast_2d(np.asarray(B, dtype=complex))
        return self.map_coeffs(lambda C: C @ B, self.rows, B.shape[1])

    def max_coeff_diff(self, other: FreeSeries, upto: int | None = None) -> float:
        """Largest coefficient norm of self - other over words of length <= upto."""
        words = set(self.coeffs) | set(other.coeffs)
        if upto is not None:
            words = {w for w in words if len(w) <= upto}
        return max((op_norm(self.coeff(w) - other.coeff(w)) for w in words), default=0.0)

    # arithmetic

    def __add__(self, other: FreeSeries) -> FreeSeries:
        return add(self, other)

    def __sub__(self, other: FreeSeries) -> FreeSeries:
        return add(self, other, 1.0, -1.0)

    def __neg__(self) -> FreeSeries:
        return self.scale(-1.0)

    def __matmul__(self, other: FreeSeries) -> FreeSeries:
        return multiply(self, other)

    def scale(self, c: complex) -> FreeSeries:
        return self.map_coeffs(lambda A: c * A, self.rows, self.cols)

    # serialization

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_degree": self.max_degree,
            "rows": self.rows,
            "cols": self.cols,
            "coeffs": [{"word": list(w), "matrix": matrix_to_dict(A)} for w, A in self.coeffs.items()],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> FreeSeries:
        coeffs = {tuple(c["word"]): matrix_from_dict(c["matrix"]) for c in d["coeffs"]}
        return cls(int(d["n"]), int(d["max_degree"]), int(d["rows"]), int(d["cols"]), coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, s: str) -> FreeSeries:
        return cls.from_dict(json.loads(s))


def matrix_to_dict(A: np.ndarray) -> dict:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_dict(d: Mapping) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    data = d["data"]
    if len(data) != rows * cols:
        raise ValueError(f"matrix data has {len(data)} entries, expected {rows * cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    return flat.reshape(rows, cols)


def _check_compatible(f: FreeSeries, g: FreeSeries):
    if f.n != g.n:
        raise ValueError(f"series over {f.n} and {g.n} variables")


def add(f: FreeSeries, g: FreeSeries, a: complex = 1.0, b: complex = 1.0) -> FreeSeries:
    _check_compatible(f, g)
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch {f.shape} vs {g.shape}")
    out = {w: a * A for w, A in f.coeffs.items()}
    for w, B in g.coeffs.items():
        out[w] = out[w] + b * B if w in out else b * B
    return FreeSeries(f.n, max(f.max_degree, g.max_degree), f.rows, f.cols, out)


def multiply(f: FreeSeries, g: FreeSeries) -> FreeSeries:
    """Free Cauchy product, (fg)_w = sum over w = uv of F_u G_v, capped."""
    _check_compatible(f, g)
    if f.cols != g.rows:
        raise ValueError(f"cannot chain {f.shape} with {g.shape}")
    cap = max(f.max_degree, g.max_degree)
    out: dict[Word, np.ndarray] = {}
    for u, A in f.coeffs.items():
        for v, B in g.coeffs.items():
            if len(u) + len(v) > cap:
                continue
            w = u + v
            out[w] = out[w] + A @ B if w in out else A @ B
    return FreeSeries(f.n, cap, f.rows, g.cols, out)


def inverse(f: FreeSeries) -> FreeSeries:
    """Two-sided inverse of a series with invertible constant term, degree by degree."""
    if f.rows != f.cols:
        raise ValueError("inverse needs square coefficients")
    if f.rows == 0:
        return FreeSeries.zero(f.n, f.max_degree, 0, 0)
    c0 = f.coeff(EMPTY)
    try:
        c0_inv = np.linalg.inv(c0)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("constant coefficient is singular") from exc
    if not np.all(np.isfinite(c0_inv)) or np.linalg.cond(c0) > 1e14:
        raise np.linalg.LinAlgError("constant coefficient is singular")
    basis = FockBasis(f.n, f.max_degree)
    h: dict[Word, np.ndarray] = {EMPTY: c0_inv}
    for w in basis.words[1:]:
        acc = None
        for k in range(1, len(w) + 1):
            A = f.coeffs.get(w[:k])
            B = h.get(w[k:])
            if A is None or B is None:
                continue
            acc = A @ B if acc is None else acc + A @ B
        if acc is not None:
            h[w] = -c0_inv @ acc
    return FreeSeries(f.n, f.max_degree, f.rows, f.cols, h)


def neumann_inverse(g: FreeSeries) -> FreeSeries:
    """(I - g)^{-1} through the cap."""
    return inverse(FreeSeries.identity(g.n, g.max_degree, g.rows) - g)


# evaluation

def word_products(X: OperatorTuple, max_len: int) -> dict[Word, np.ndarray]:
    """X_w = X_{i1} ... X_{ik} for all words of length <= max_len."""
    dim = X[0].shape[0]
    prods: dict[Word, np.ndarray] = {EMPTY: np.eye(dim, dtype=complex)}
    layer = {EMPTY: prods[EMPTY]}
    for _ in range(max_len):
        nxt = {}
        for w, P in layer.items():
            for i, Xi in enumerate(X, start=1):
                nxt[(i,) + w] = Xi @ P
        prods.update(nxt)
        layer = nxt
    return prods


def row_norm(X: OperatorTuple) -> float:
    return op_norm(sum(Xi @ adj(Xi) for Xi in X))


def nilpotency_order(X: OperatorTuple, atol: float = 1e-13) -> int | None:
    """Smallest k with X_w = 0 for every |w| = k, or None if the tuple is not nilpotent."""
    dim = X[0].shape[0]
    Y = np.eye(dim, dtype=complex)
    for k in range(1, dim + 2):
        Y = sum(Xi @ Y @ adj(Xi) for Xi in X)
        if np.max(np.abs(Y), initial=0.0) <= atol:
            return k
    return None


def _check_tuple(X: OperatorTuple, n: int):
    if len(X) != n:
        raise ValueError(f"expected {n} operators, got {len(X)}")
    dim = X[0].shape[0]
    for Xi in X:
        if Xi.shape != (dim, dim):
            raise ValueError("tuple entries must be square of equal size")


def eval_tuple(f: FreeSeries, X: OperatorTuple, *, nilpotent: bool = False) -> np.ndarray:
    """sum_w A_w (x) X_w, a matrix on E (x) H -> Y (x) H."""
    X = [np.asarray(Xi, dtype=complex) for Xi in X]
    _check_tuple(X, f.n)
    if not nilpotent and row_norm(X) >= 1.0 and nilpotency_order(X) is None:
        raise TruncationError("tuple has row norm >= 1 and is not nilpotent")
    dim = X[0].shape[0]
    prods = word_products(X, f.degree)
    out = np.zeros((f.rows * dim, f.cols * dim), dtype=complex)
    for w, A in f.coeffs.items():
        out += np.kron(A, prods[w])
    return out


def radial_eval(f: FreeSeries, r: float, basis: FockBasis, side: str = "right") -> np.ndarray:
    """f(rC_1, ..., rC_n) with C_i the truncated left or right creation operators."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"radius {r} outside [0, 1]")
    if basis.n != f.n:
        raise ValueError("basis and series disagree on n")
    return eval_tuple(f, basis.creation_tuple(side, r), nilpotent=True)


def h2_norm(f: FreeSeries) -> float:
    gram = sum((adj(A) @ A for A in f.coeffs.values()), np.zeros((f.cols, f.cols), dtype=complex))
    return float(np.sqrt(max(op_norm(gram), 0.0)))


def hinf_norm(f: FreeSeries, basis: FockBasis) -> float:
    """Norm at the nilpotent right-creation tuple of degree basis.m: a lower bound for the sup norm."""
    return op_norm(radial_eval(f, 1.0, basis, "right"))


def vstack(parts: Iterable[FreeSeries]) -> FreeSeries:
    parts = list(parts)
    n, cap, cols = parts[0].n, max(p.max_degree for p in parts), parts[0].cols
    if any(p.cols != cols or p.n != n for p in parts):
        raise ValueError("stacked series must share n and column space")
    words = sorted({w for p in parts for w in p.coeffs}, key=_word_key)
    coeffs = {w: np.vstack([p.coeff(w) for p in parts]) for w in words}
    return FreeSeries(n, cap, sum(p.rows for p in parts), cols, coeffs)


def row_block(f: FreeSeries, start: int, stop: int) -> FreeSeries:
    return f.map_coeffs(lambda A: A[start:stop], stop - start, f.cols)
