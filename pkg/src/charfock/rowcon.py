"""Row contractions, their defect data, the completely-non-co-isometric
test, and the characteristic-function symbol with its Fock-space oracle.

A row contraction is a d-tuple of square blocks acting as one contraction
from the d-fold direct sum of the state space to the state space.  Its
characteristic symbol is stored in defect orthonormal coordinates: the
input space is the range of the defect of the row, the output space the
range of the adjoint defect.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NotContraction, ShapeMismatch
from .fockseries import NCSeries, build_fock, enumerate_words
from .numlin import (
    RANK_TOL,
    OrthonormalBasis,
    as_matrix,
    hermitian_eig,
    orth_complement,
    psd_sqrt_with_basis,
    smallest_invariant_subspace,
)

CONTRACTION_TOL = 1e-10

__all__ = [
    "RowContraction",
    "DefectPair",
    "ValidationReport",
    "validate",
    "defects",
    "cnc_subspace",
    "is_cnc",
    "char_symbol",
    "char_symbol_oracle",
    "popescu_colligation",
]


@dataclass(frozen=True)
class RowContraction:
    """d square blocks forming a row operator from the d-fold sum."""

    blocks: tuple = field(repr=False)

    def __post_init__(self):
        mats = tuple(as_matrix(b) for b in self.blocks)
        if not mats:
            raise ShapeMismatch("a row contraction needs at least one block")
        n = mats[0].shape[0]
        for b in mats:
            if b.shape != (n, n):
                raise ShapeMismatch("all blocks must be square of equal size")
        object.__setattr__(self, "blocks", mats)

    @property
    def dim(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def arity(self) -> int:
        return len(self.blocks)

    def row(self) -> np.ndarray:
        """The n x (n d) matrix of the row operator."""
        return np.hstack(self.blocks)

    def gram(self) -> np.ndarray:
        """Sum of T_i T_i*, the row times its adjoint."""
        row = self.row()
        return row @ row.conj().T


@dataclass(frozen=True)
class ValidationReport:
    is_contraction: bool
    norm: float  # largest eigenvalue of sum T_i T_i* (squared row norm)


@dataclass(frozen=True)
class DefectPair:
    """Defect operators of a row contraction with range bases.

    ``D`` is the square root of (I - row* row) on the d-fold sum, ``Dstar``
    the square root of (I - row row*) on the state space; the bases span
    their numerically detected ranges.  The pseudo-inverses are built from
    the same eigendecompositions (rank detected on the squared defects,
    where eigenvalue noise is not amplified by the root).
    """

    D: np.ndarray = field(repr=False)
    Dstar: np.ndarray = field(repr=False)
    basis_D: OrthonormalBasis
    basis_Dstar: OrthonormalBasis
    rank_tol: float
    D_pinv: np.ndarray = field(repr=False, default=None)
    Dstar_pinv: np.ndarray = field(repr=False, default=None)


def validate(T: RowContraction, tol: float = CONTRACTION_TOL) -> ValidationReport:
    """Check the row-contraction condition and report the squared row norm."""
    if T.dim == 0:
        return ValidationReport(True, 0.0)
    w, _ = hermitian_eig(T.gram())
    lam_max = float(w[0]) if w.size else 0.0
    return ValidationReport(lam_max <= 1.0 + tol, lam_max)


def _require_contraction(T: RowContraction, tol: float = CONTRACTION_TOL):
    report = validate(T, tol)
    if not report.is_contraction:
        raise NotContraction(
            f"row gram has top eigenvalue {report.norm:.6e} > 1 + tol"
        )


def defects(T: RowContraction, rank_tol: float = RANK_TOL) -> DefectPair:
    """Defect operators and orthonormal bases of their closed ranges."""
    _require_contraction(T)
    n, d = T.dim, T.arity
    row = T.row()
    dmat, basis_d, dinv = psd_sqrt_with_basis(
        np.eye(n * d) - row.conj().T @ row, rank_tol, floor=1.0
    )
    dstar, basis_star, dstar_inv = psd_sqrt_with_basis(
        np.eye(n) - row @ row.conj().T, rank_tol, floor=1.0
    )
    return DefectPair(
        D=dmat,
        Dstar=dstar,
        basis_D=basis_d,
        basis_Dstar=basis_star,
        rank_tol=rank_tol,
        D_pinv=dinv,
        Dstar_pinv=dstar_inv,
    )


def cnc_subspace(T: RowContraction, rank_tol: float = RANK_TOL) -> OrthonormalBasis:
    """Basis of the largest subspace on which the row acts co-isometrically.

    This is the largest subspace of ker(Dstar) invariant under every
    adjoint block, computed by the exact finite iteration in its dual form:
    the orthogonal complement of the smallest block-invariant subspace
    containing the range of Dstar.  The row is completely non-co-isometric
    exactly when the result is empty.
    """
    _require_contraction(T)
    pair = defects(T, rank_tol)
    reach = smallest_invariant_subspace(
        T.blocks, pair.basis_Dstar.vectors, rank_tol
    )
    return OrthonormalBasis(T.dim, orth_complement(reach))


def is_cnc(T: RowContraction, rank_tol: float = RANK_TOL) -> bool:
    return cnc_subspace(T, rank_tol).dim == 0


def _word_products_adjoint(blocks, degree: int) -> dict:
    """Products adj(T_last) @ ... @ adj(T_first) for words up to a degree."""
    adjoints = [b.conj().T for b in blocks]
    n = blocks[0].shape[0]
    prods = {(): np.eye(n, dtype=np.complex128)}
    frontier = [()]
    for _ in range(degree):
        nxt = []
        for w in frontier:
            base = prods[w]
            for i, adj in enumerate(adjoints, start=1):
                ww = w + (i,)
                prods[ww] = adj @ base
                nxt.append(ww)
        frontier = nxt
    return prods


def char_symbol(T: RowContraction, degree: int, rank_tol: float = RANK_TOL) -> NCSeries:
    """Characteristic symbol of a row contraction in defect coordinates.

    The empty-word coefficient is minus the row compressed to the defect
    ranges.  For a word (j, k_1, ..., k_m) the coefficient is
    Dstar @ adj(T_{k_m}) @ ... @ adj(T_{k_1}) @ (block j of D), compressed
    likewise; the binding of the first letter to the block selection and
    the reversed adjoint order are normative and pinned against the
    Fock-space oracle.

    A non-completely-non-co-isometric input still yields coefficients but
    triggers a warning.
    """
    _require_contraction(T)
    if not is_cnc(T, rank_tol):
        warnings.warn(
            "row contraction is not completely non-co-isometric; "
            "characteristic symbol computed anyway",
            stacklevel=2,
        )
    return _char_symbol_noflag(T, degree, rank_tol)


def _char_symbol_noflag(T: RowContraction, degree: int, rank_tol: float) -> NCSeries:
    n, d = T.dim, T.arity
    pair = defects(T, rank_tol)
    q_in = pair.basis_D.vectors
    q_out = pair.basis_Dstar.vectors
    d_cols = pair.D @ q_in
    out_map = q_out.conj().T @ pair.Dstar
    prods = _word_products_adjoint(T.blocks, max(degree - 1, 0))
    coeffs = {(): q_out.conj().T @ (-T.row()) @ q_in}
    for word in enumerate_words(d, degree):
        if not word:
            continue
        j, rest = word[0], word[1:]
        block_j = d_cols[(j - 1) * n : j * n, :]
        coeffs[word] = out_map @ prods[rest] @ block_j
    return NCSeries(d, q_in.shape[1], q_out.shape[1], degree, coeffs)


def char_symbol_oracle(T: RowContraction, degree: int, rank_tol: float = RANK_TOL) -> NCSeries:
    """Characteristic symbol via explicit truncated Fock-space matrices.

    Evaluates the defining expression directly: the resolvent is the exact
    finite Neumann sum of the grade-raising operator built from the right
    creations, applied to the empty-word input slab.  Serves as the
    independent cross-check for :func:`char_symbol`.
    """
    _require_contraction(T)
    n, d = T.dim, T.arity
    fock = build_fock(d, degree)
    pair = defects(T, rank_tol)
    q_in = pair.basis_D.vectors
    q_out = pair.basis_Dstar.vectors
    p = q_in.shape[1]
    dim = fock.dim

    step = None
    for i in range(d):
        term = sp.kron(fock.creation_right[i], sp.csr_matrix(T.blocks[i].conj().T))
        step = term if step is None else step + term
    step = step.tocsr()

    d_cols = pair.D @ q_in
    slab = np.zeros((dim * n, p), dtype=np.complex128)
    for j in range(1, d + 1):
        iw = fock.index[(j,)]
        slab[iw * n : (iw + 1) * n, :] = d_cols[(j - 1) * n : j * n, :]
    acc = slab.copy()
    for _ in range(degree):
        slab = step @ slab
        acc += slab

    out_map = q_out.conj().T @ pair.Dstar
    coeffs = {(): q_out.conj().T @ (-T.row()) @ q_in}
    for word, iw in fock.index.items():
        if not word:
            continue
        coeffs[word] = out_map @ acc[iw * n : (iw + 1) * n, :]
    return NCSeries(d, p, q_out.shape[1], degree, coeffs)


def popescu_colligation(T: RowContraction, rank_tol: float = RANK_TOL):
    """Colligation whose transfer function is the characteristic symbol.

    State space is the ambient state space, input the defect range of the
    row, output the adjoint defect range; the block operator is co-isometric
    for every row contraction and observable whenever the row is completely
    non-co-isometric.
    """
    from .colligation import Colligation

    _require_contraction(T)
    pair = defects(T, rank_tol)
    q_in = pair.basis_D.vectors
    q_out = pair.basis_Dstar.vectors
    a_blocks = tuple(b.conj().T for b in T.blocks)
    return Colligation(
        a_blocks=a_blocks,
        b=pair.D @ q_in,
        c=q_out.conj().T @ pair.Dstar,
        d=q_out.conj().T @ (-T.row()) @ q_in,
    )
