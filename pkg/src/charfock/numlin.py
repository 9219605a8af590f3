"""Dense complex linear-algebra kernels used by every other module.

All routines work on ``numpy.ndarray`` matrices of dtype complex128 and are
pure functions of their inputs.  Eigenvector phases follow a fixed
convention (first component of largest modulus made real nonnegative) so
that repeated runs on identical inputs produce identical bytes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitian, NotPSD, NotSquare, ShapeMismatch

RANK_TOL = 1e-10
CLAMP_TOL = 1e-10
SYM_TOL = 1e-10

__all__ = [
    "RANK_TOL",
    "CLAMP_TOL",
    "OrthonormalBasis",
    "as_matrix",
    "spectral_norm",
    "hermitian_eig",
    "psd_sqrt",
    "psd_sqrt_with_basis",
    "range_onb",
    "pinv",
    "polar_unitary",
    "procrustes",
    "orth_cols",
    "orth_complement",
    "smallest_invariant_subspace",
]


def as_matrix(mat) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ShapeMismatch("matrix contains NaN or Inf entries")
    return arr


def spectral_norm(mat) -> float:
    """Operator 2-norm; zero for empty matrices."""
    arr = as_matrix(mat)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Columns of an isometry into an ambient coordinate space.

    ``vectors`` has shape (ambient_dim, dim); the Gram matrix of the columns
    equals the identity within 1e-12.
    """

    ambient_dim: int
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        vecs = as_matrix(self.vectors)
        if vecs.shape[0] != self.ambient_dim:
            raise ShapeMismatch("basis vectors do not live in the ambient space")
        gram = vecs.conj().T @ vecs
        if spectral_norm(gram - np.eye(vecs.shape[1])) > 1e-12:
            raise ShapeMismatch("basis columns are not orthonormal within 1e-12")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T


def _require_square(mat: np.ndarray):
    if mat.shape[0] != mat.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {mat.shape}")


def _require_hermitian(mat: np.ndarray, tol: float = SYM_TOL):
    dev = spectral_norm(mat - mat.conj().T)
    if dev > tol * (1.0 + spectral_norm(mat)):
        raise NotHermitian(f"symmetry defect {dev:.3e} exceeds tolerance")


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first largest-modulus entry is real >= 0."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        if mags.size == 0:
            continue
        k = int(np.argmax(mags))
        if mags[k] > 0.0:
            out[:, j] = col * (np.conj(col[k]) / mags[k])
    return out


def hermitian_eig(mat, sym_tol: float = SYM_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues sorted in
    descending order and unitary eigenvector columns in the deterministic
    phase convention.  ``mat = V diag(w) V*`` within 1e-10*(1+||mat||).
    """
    arr = as_matrix(mat)
    _require_square(arr)
    _require_hermitian(arr, sym_tol)
    herm = 0.5 * (arr + arr.conj().T)
    w, v = np.linalg.eigh(herm)
    order = np.argsort(-w, kind="stable")  # ties keep their original order
    w = w[order].real.copy()
    v = _fix_phases(v[:, order])
    return w, v


def psd_sqrt(mat, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-clamp_tol*||mat||, 0)`` are clamped to zero; anything
    more negative raises ``NotPSD``.
    """
    w, v = hermitian_eig(mat)
    if w.size == 0:
        return np.zeros_like(as_matrix(mat))
    scale = float(np.max(np.abs(w)))
    if np.min(w) < -clamp_tol * scale:
        raise NotPSD(f"eigenvalue {np.min(w):.3e} below -clamp_tol*||mat||")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def range_onb(mat, rank_tol: float = RANK_TOL) -> OrthonormalBasis:
    """Orthonormal basis of the numerically detected range of a PSD matrix.

    Keeps the eigenspaces with eigenvalue > rank_tol * (largest eigenvalue);
    the zero matrix yields an empty basis.
    """
    w, v = hermitian_eig(mat)
    n = v.shape[0]
    if w.size == 0:
        return OrthonormalBasis(n, np.zeros((n, 0), dtype=np.complex128))
    lam_max = float(np.max(w))
    if lam_max <= 0.0:
        return OrthonormalBasis(n, np.zeros((n, 0), dtype=np.complex128))
    keep = w > rank_tol * lam_max
    return OrthonormalBasis(n, v[:, keep])


def psd_sqrt_with_basis(
    mat, rank_tol: float = RANK_TOL, clamp_tol: float = CLAMP_TOL, floor: float = 0.0
):
    """Square root, range basis and pseudo-inverse of the root, jointly.

    One eigendecomposition serves all three, so the numerical rank is
    detected on the given PSD matrix (not on its root, where eigenvalue
    noise is amplified by the square root), eigenvalues below the cutoff
    are zeroed in the root as well, and the pseudo-inverse inverts exactly
    the retained eigendirections.  Root, basis and pseudo-inverse therefore
    agree on one numerical rank, and the root still squares back to the
    input within the cutoff.

    ``floor`` anchors the cutoff at ``rank_tol * max(lam_max, floor)``; pass
    the natural scale of the computation (one, for defects of contractions)
    so that a matrix consisting of pure rounding noise has empty rank.

    Returns ``(root, basis, root_pinv)``.
    """
    w, v = hermitian_eig(mat)
    n = v.shape[0]
    if w.size == 0:
        zero = np.zeros((n, n), dtype=np.complex128)
        return zero, OrthonormalBasis(n, np.zeros((n, 0), dtype=np.complex128)), zero
    scale = float(np.max(np.abs(w)))
    if np.min(w) < -clamp_tol * max(scale, 1.0):
        raise NotPSD(f"eigenvalue {np.min(w):.3e} below -clamp_tol*scale")
    w = np.clip(w, 0.0, None)
    lam_max = float(np.max(w))
    cut = rank_tol * max(lam_max, floor)
    keep = w > cut if cut > 0.0 or lam_max > 0.0 else np.zeros_like(w, dtype=bool)
    root = np.where(keep, np.sqrt(w), 0.0)
    s = (v * root) @ v.conj().T
    s = 0.5 * (s + s.conj().T)
    basis = OrthonormalBasis(n, v[:, keep])
    vk = v[:, keep]
    root_pinv = (
        (vk / root[keep]) @ vk.conj().T
        if np.any(keep)
        else np.zeros((n, n), dtype=np.complex128)
    )
    return s, basis, root_pinv


def pinv(mat, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with singular values cut at rank_tol."""
    arr = as_matrix(mat)
    if arr.size == 0:
        return np.zeros((arr.shape[1], arr.shape[0]), dtype=np.complex128)
    return np.linalg.pinv(arr, rcond=rank_tol)


def polar_unitary(mat) -> np.ndarray:
    """Unitary factor of the polar decomposition ``mat = U P``.

    For singular inputs the null directions are completed deterministically:
    range columns come from the phase-fixed eigenbasis of ``mat* mat`` and
    the remainder is filled by orthogonalising standard basis vectors, so
    the zero matrix maps to the identity.
    """
    arr = as_matrix(mat)
    _require_square(arr)
    n = arr.shape[0]
    if n == 0:
        return arr.copy()
    w, v = hermitian_eig(arr.conj().T @ arr)
    sig = np.sqrt(np.clip(w, 0.0, None))
    cutoff = (sig[0] if sig.size else 0.0) * 1e-13
    left = np.zeros((n, n), dtype=np.complex128)
    r = 0
    for i in range(n):
        if sig[i] > cutoff:
            left[:, r] = (arr @ v[:, i]) / sig[i]
            r += 1
    # Gram-Schmidt touch-up keeps the range columns orthonormal to working
    # precision even for clustered singular values.
    for i in range(r):
        for j in range(i):
            left[:, i] -= (left[:, j].conj() @ left[:, i]) * left[:, j]
        left[:, i] /= np.linalg.norm(left[:, i])
    while r < n:
        resid = np.eye(n, dtype=np.complex128) - left[:, :r] @ left[:, :r].conj().T
        norms = np.linalg.norm(resid, axis=0)
        k = int(np.argmax(norms))
        col = resid[:, k] / norms[k]
        left[:, r] = _fix_phases(col.reshape(-1, 1))[:, 0]
        r += 1
    return left @ v.conj().T


def procrustes(targets) -> np.ndarray:
    """Unitary ``U`` best aligning matrix pairs ``Y_k ~ X_k @ U``.

    Parameters
    ----------
    targets : iterable of (X, Y) pairs
        All X share one shape and all Y another; the two column counts must
        agree so that a square unitary exists.

    Returns
    -------
    U : ndarray
        ``polar_unitary(sum_k X_k* Y_k)``, the maximiser of
        ``sum_k Re tr(U* X_k* Y_k)``.  An empty accumulation yields the
        identity by the singular completion convention.
    """
    pairs = [(as_matrix(x), as_matrix(y)) for x, y in targets]
    if not pairs:
        raise ShapeMismatch("procrustes needs at least one (X, Y) pair")
    x_shape = pairs[0][0].shape
    y_shape = pairs[0][1].shape
    if x_shape[1] != y_shape[1]:
        raise ShapeMismatch("X and Y column counts differ; no square unitary")
    acc = np.zeros((x_shape[1], y_shape[1]), dtype=np.complex128)
    for x, y in pairs:
        if x.shape != x_shape or y.shape != y_shape:
            raise ShapeMismatch("inconsistent shapes across procrustes pairs")
        if x.shape[0] != y.shape[0]:
            raise ShapeMismatch("X and Y row counts differ within a pair")
        acc += x.conj().T @ y
    return polar_unitary(acc)


def orth_cols(mat, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis for the column span of ``mat`` (SVD rank cut)."""
    arr = as_matrix(mat)
    if arr.size == 0:
        return np.zeros((arr.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(arr, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((arr.shape[0], 0), dtype=np.complex128)
    rank = int(np.sum(s > tol * s[0]))
    return _fix_phases(u[:, :rank])


def orth_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis)."""
    arr = as_matrix(basis)
    n, k = arr.shape
    if k == 0:
        return _fix_phases(np.eye(n, dtype=np.complex128))
    u, _, _ = np.linalg.svd(arr, full_matrices=True)
    return _fix_phases(u[:, k:])


def smallest_invariant_subspace(ops, seed_cols, tol: float = RANK_TOL) -> np.ndarray:
    """Smallest subspace containing span(seed_cols) invariant under each op.

    Iterates ``S <- orth([S, op_1 S, ..., op_k S])`` until the dimension is
    stable; terminates in at most ambient-dimension steps.
    """
    span = orth_cols(as_matrix(seed_cols), tol)
    n = span.shape[0]
    for _ in range(n + 1):
        stacked = [span] + [as_matrix(op) @ span for op in ops]
        grown = orth_cols(np.hstack(stacked), tol)
        if grown.shape[1] == span.shape[1]:
            return grown
        span = grown
    return span
