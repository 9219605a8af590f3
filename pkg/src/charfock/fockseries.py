"""Words over d letters, truncated noncommutative power series, and
explicit truncated Fock-space creation operators.

Conventions (normative for the whole package):

* Words are tuples of 1-based letters, enumerated in graded lexicographic
  order (by length, then lexicographically); the empty word comes first.
* Right creation appends a letter (``e_w -> e_{w + (i,)}``), left creation
  prepends one; both annihilate top-degree words on the truncated space.
* The matrix of the multiplication operator attached to a series has its
  coefficient for word ``w`` in the block whose output word is the input
  word extended on the right by ``w``.  This is the unique filling that
  commutes with the left creations away from the truncation boundary and
  that the Neumann-sum oracles in the other modules reproduce.
"""

import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ArityNotOne, ShapeMismatch, TooLarge
from .numlin import as_matrix

WORD_BUDGET = 200000

Word = tuple

__all__ = [
    "Word",
    "WORD_BUDGET",
    "word_count",
    "enumerate_words",
    "NCSeries",
    "series_apply_output",
    "series_eval_scalar",
    "eval_tail_bound",
    "series_max_dev",
    "TruncatedFock",
    "build_fock",
    "series_from_fock_operator",
    "multianalytic_matrix",
    "multianalytic_norm",
]


def word_count(d: int, degree: int) -> int:
    """Number of words of length <= degree over d letters."""
    if d == 1:
        return degree + 1
    return (d ** (degree + 1) - 1) // (d - 1)


def _check_word_budget(d: int, degree: int):
    if d < 1:
        raise ShapeMismatch("arity must be at least 1")
    if degree < 0:
        raise ShapeMismatch("degree must be nonnegative")
    total = word_count(d, degree)
    if total > WORD_BUDGET:
        raise TooLarge(f"{total} words exceed the budget of {WORD_BUDGET}")


def enumerate_words(d: int, degree: int) -> list:
    """All words of length <= degree in graded lexicographic order."""
    _check_word_budget(d, degree)
    words = [()]
    level = [()]
    for _ in range(degree):
        level = [w + (i,) for w in level for i in range(1, d + 1)]
        words.extend(level)
    return words


def _validate_word(word, d: int, degree: int):
    if len(word) > degree:
        raise ShapeMismatch(f"word {word} longer than degree {degree}")
    for letter in word:
        if not 1 <= int(letter) <= d:
            raise ShapeMismatch(f"letter {letter} outside 1..{d}")


@dataclass(frozen=True)
class NCSeries:
    """Truncated noncommutative power series with matrix coefficients.

    ``coeffs`` maps every word of length <= degree to an out_dim x in_dim
    matrix; words missing from the constructor argument are filled with
    zeros.  Instances are treated as immutable.
    """

    d: int
    in_dim: int
    out_dim: int
    degree: int
    coeffs: dict = field(repr=False)

    def __post_init__(self):
        _check_word_budget(self.d, self.degree)
        if self.in_dim < 0 or self.out_dim < 0:
            raise ShapeMismatch("negative coefficient dimensions")
        full = {}
        for word, mat in self.coeffs.items():
            word = tuple(int(x) for x in word)
            _validate_word(word, self.d, self.degree)
            arr = as_matrix(mat)
            if arr.shape != (self.out_dim, self.in_dim):
                raise ShapeMismatch(
                    f"coefficient at {word} has shape {arr.shape}, "
                    f"expected {(self.out_dim, self.in_dim)}"
                )
            full[word] = arr
        zero = np.zeros((self.out_dim, self.in_dim), dtype=np.complex128)
        for word in enumerate_words(self.d, self.degree):
            full.setdefault(word, zero)
        object.__setattr__(self, "coeffs", full)

    def coeff(self, word) -> np.ndarray:
        return self.coeffs[tuple(word)]

    def words(self) -> list:
        return enumerate_words(self.d, self.degree)

    def stacked(self) -> np.ndarray:
        """Coefficients stacked as a (words, out_dim, in_dim) tensor."""
        return np.stack([self.coeffs[w] for w in self.words()], axis=0)

    def coefficient_norm_sum(self) -> float:
        return float(sum(np.linalg.norm(c) for c in self.coeffs.values()))


def series_apply_output(g, series: NCSeries) -> NCSeries:
    """Compose every coefficient with a constant operator on the output."""
    mat = as_matrix(g)
    if mat.shape[1] != series.out_dim:
        raise ShapeMismatch(
            f"operator with {mat.shape[1]} columns cannot act on "
            f"output dimension {series.out_dim}"
        )
    coeffs = {w: mat @ c for w, c in series.coeffs.items()}
    return NCSeries(series.d, series.in_dim, mat.shape[0], series.degree, coeffs)


def series_eval_scalar(series: NCSeries, lam: complex) -> np.ndarray:
    """Evaluate a one-variable series at a point of the open unit disc.

    Truncation error is at most ``eval_tail_bound(degree, |lam|)`` when all
    coefficient norms are bounded by one (true for every symbol of a
    contractive multi-analytic operator).
    """
    if series.d != 1:
        raise ArityNotOne("scalar evaluation needs a one-variable series")
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise ShapeMismatch("evaluation point must lie in the open unit disc")
    acc = np.zeros((series.out_dim, series.in_dim), dtype=np.complex128)
    power = 1.0 + 0.0j
    for n in range(series.degree + 1):
        acc += power * series.coeffs[(1,) * n]
        power *= lam
    return acc


def eval_tail_bound(degree: int, r: float) -> float:
    """Bound ``r**(degree+1) / (1-r)`` on the dropped tail at radius r."""
    r = float(abs(r))
    if r >= 1.0:
        return np.inf
    return r ** (degree + 1) / (1.0 - r)


def series_max_dev(s1: NCSeries, s2: NCSeries) -> float:
    """Largest entrywise coefficient deviation between two series."""
    if (s1.d, s1.in_dim, s1.out_dim, s1.degree) != (
        s2.d,
        s2.in_dim,
        s2.out_dim,
        s2.degree,
    ):
        raise ShapeMismatch("series dimensions differ")
    if s1.in_dim == 0 or s1.out_dim == 0:
        return 0.0
    return float(np.max(np.abs(s1.stacked() - s2.stacked())))


@dataclass(frozen=True)
class TruncatedFock:
    """Word basis and creation matrices of the degree-truncated Fock space.

    ``creation_right[i-1]`` maps the basis vector of word w to that of
    ``w + (i,)`` and to zero when w already has full length;
    ``creation_left`` prepends instead.  Matrices are sparse CSR with 0/1
    entries, so their algebra is exact.
    """

    d: int
    degree: int
    words: tuple
    index: dict = field(repr=False)
    creation_right: tuple = field(repr=False)
    creation_left: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.words)


_fock_cache: dict = {}
_fock_lock = threading.Lock()


def build_fock(d: int, degree: int) -> TruncatedFock:
    """Construct (and cache per (d, degree)) the truncated Fock operators."""
    key = (int(d), int(degree))
    with _fock_lock:
        cached = _fock_cache.get(key)
    if cached is not None:
        return cached
    words = enumerate_words(d, degree)
    index = {w: i for i, w in enumerate(words)}
    dim = len(words)
    rights = []
    lefts = []
    for letter in range(1, d + 1):
        rows_r, cols_r, rows_l, cols_l = [], [], [], []
        for w, i in index.items():
            if len(w) < degree:
                rows_r.append(index[w + (letter,)])
                cols_r.append(i)
                rows_l.append(index[(letter,) + w])
                cols_l.append(i)
        data = np.ones(len(rows_r), dtype=np.complex128)
        rights.append(
            sp.csr_matrix((data, (rows_r, cols_r)), shape=(dim, dim))
        )
        lefts.append(
            sp.csr_matrix((data.copy(), (rows_l, cols_l)), shape=(dim, dim))
        )
    fock = TruncatedFock(d, degree, tuple(words), index, tuple(rights), tuple(lefts))
    with _fock_lock:
        _fock_cache.setdefault(key, fock)
    return fock


def series_from_fock_operator(mat, fock: TruncatedFock, in_dim: int, out_dim: int) -> NCSeries:
    """Extract series coefficients from an operator matrix on Fock tensor space.

    The coefficient at word w is the block sending the empty-word input slot
    to the w output slot.
    """
    arr = as_matrix(mat)
    dim = fock.dim
    if arr.shape != (dim * out_dim, dim * in_dim):
        raise ShapeMismatch(
            f"operator shape {arr.shape} does not match "
            f"{(dim * out_dim, dim * in_dim)}"
        )
    coeffs = {}
    for w, i in fock.index.items():
        coeffs[w] = arr[i * out_dim : (i + 1) * out_dim, 0:in_dim]
    return NCSeries(fock.d, in_dim, out_dim, fock.degree, coeffs)


def multianalytic_matrix(series: NCSeries, fock: TruncatedFock) -> np.ndarray:
    """Dense matrix of the multiplication operator attached to a series.

    Block (output word, input word) carries the coefficient of w exactly
    when the output word is the input word with w appended on the right;
    the operator then commutes with every left creation on inputs short
    enough to avoid the truncation boundary.
    """
    if fock.d != series.d or fock.degree != series.degree:
        raise ShapeMismatch("Fock space arity/degree do not match the series")
    dim = fock.dim
    p, q = series.in_dim, series.out_dim
    out = np.zeros((dim * q, dim * p), dtype=np.complex128)
    degree = series.degree
    for alpha, ia in fock.index.items():
        room = degree - len(alpha)
        for w in enumerate_words(series.d, room):
            ib = fock.index[alpha + w]
            out[ib * q : (ib + 1) * q, ia * p : (ia + 1) * p] = series.coeffs[w]
    return out


def multianalytic_norm(series: NCSeries, iters: int = 400, tol: float = 1e-13) -> float:
    """Operator norm of the attached multiplication operator.

    Power iteration on M* M from a deterministic start vector; adequate for
    the moderate truncation sizes used in verification.
    """
    fock = build_fock(series.d, series.degree)
    if fock.dim * max(series.in_dim, 1) * fock.dim * max(series.out_dim, 1) > 2.5e7:
        raise TooLarge("multianalytic matrix too large to materialise")
    mat = multianalytic_matrix(series, fock)
    if mat.size == 0:
        return 0.0
    vec = np.ones(mat.shape[1], dtype=np.complex128)
    vec /= np.linalg.norm(vec)
    prev = 0.0
    for _ in range(iters):
        nxt = mat.conj().T @ (mat @ vec)
        norm = np.linalg.norm(nxt)
        if norm == 0.0:
            return 0.0
        vec = nxt / norm
        if abs(norm - prev) <= tol * max(norm, 1.0):
            prev = norm
            break
        prev = norm
    return float(np.sqrt(prev))
