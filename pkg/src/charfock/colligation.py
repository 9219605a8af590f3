"""Colligations (block operators from state+input to stacked-state+output),
their transfer-function symbols, co-isometry and observability checks, the
structure theorem for co-isometric observable colligations, and the
defect-dimension constructor.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import HypothesisViolated, OutOfRange, ShapeMismatch
from .fockseries import NCSeries, build_fock, enumerate_words
from .numlin import (
    RANK_TOL,
    OrthonormalBasis,
    as_matrix,
    orth_complement,
    pinv,
    smallest_invariant_subspace,
    spectral_norm,
)
from .rowcon import RowContraction, defects

__all__ = [
    "Colligation",
    "transfer_symbol",
    "transfer_oracle",
    "is_coisometric",
    "unobservable_subspace",
    "StructureDecomposition",
    "structure_decompose",
    "make_defect_constrained",
]


@dataclass(frozen=True)
class Colligation:
    """Block operator ``[[A, B], [C, D]]`` with a d-fold stacked state row.

    ``a_blocks`` holds the d square state blocks (the stacked map from the
    state space to its d-fold sum), ``b`` maps the input space into the
    d-fold state sum, ``c`` the state space into the output space and ``d``
    the input space into the output space.
    """

    a_blocks: tuple = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        blocks = tuple(as_matrix(x) for x in self.a_blocks)
        if not blocks:
            raise ShapeMismatch("a colligation needs at least one state block")
        n1 = blocks[0].shape[0]
        for blk in blocks:
            if blk.shape != (n1, n1):
                raise ShapeMismatch("state blocks must be square of equal size")
        b = as_matrix(self.b)
        c = as_matrix(self.c)
        dmat = as_matrix(self.d)
        if b.shape[0] != len(blocks) * n1:
            raise ShapeMismatch("input block does not map into the stacked state")
        if c.shape[1] != n1:
            raise ShapeMismatch("output block does not act on the state space")
        if dmat.shape != (c.shape[0], b.shape[1]):
            raise ShapeMismatch("feedthrough block has inconsistent shape")
        object.__setattr__(self, "a_blocks", blocks)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", dmat)

    @property
    def arity(self) -> int:
        return len(self.a_blocks)

    @property
    def state_dim(self) -> int:
        return self.a_blocks[0].shape[0]

    @property
    def in_dim(self) -> int:
        return self.b.shape[1]

    @property
    def out_dim(self) -> int:
        return self.c.shape[0]

    def b_block(self, j: int) -> np.ndarray:
        """j-th (1-based) block of the input map."""
        n1 = self.state_dim
        return self.b[(j - 1) * n1 : j * n1, :]

    def matrix(self) -> np.ndarray:
        """Full block matrix from state+input to stacked-state+output."""
        a_stack = np.vstack(self.a_blocks)
        top = np.hstack([a_stack, self.b])
        bottom = np.hstack([self.c, self.d])
        return np.vstack([top, bottom])


def _word_products(blocks, degree: int) -> dict:
    """Products T_{k_m} @ ... @ T_{k_1} indexed by the word (k_1,...,k_m)."""
    n = blocks[0].shape[0]
    prods = {(): np.eye(n, dtype=np.complex128)}
    frontier = [()]
    for _ in range(degree):
        nxt = []
        for w in frontier:
            base = prods[w]
            for i, blk in enumerate(blocks, start=1):
                ww = w + (i,)
                prods[ww] = blk @ base
                nxt.append(ww)
        frontier = nxt
    return prods


def transfer_symbol(W: Colligation, degree: int) -> NCSeries:
    """Transfer-function symbol of a colligation.

    The empty-word coefficient is the feedthrough block; the coefficient of
    a word (j, k_1, ..., k_m) is C @ A_{k_m} @ ... @ A_{k_1} @ B_j, the
    Neumann expansion of the resolvent form.  Must agree with
    :func:`transfer_oracle` coefficientwise.
    """
    prods = _word_products(W.a_blocks, max(degree - 1, 0))
    coeffs = {(): W.d.copy()}
    for word in enumerate_words(W.arity, degree):
        if not word:
            continue
        j, rest = word[0], word[1:]
        coeffs[word] = W.c @ prods[rest] @ W.b_block(j)
    return NCSeries(W.arity, W.in_dim, W.out_dim, degree, coeffs)


def transfer_oracle(W: Colligation, degree: int) -> NCSeries:
    """Transfer symbol evaluated on explicit truncated Fock matrices.

    Applies the exact finite Neumann sum of the grade-raising operator to
    the empty-word input slab; independent cross-check for
    :func:`transfer_symbol`.
    """
    d, n1 = W.arity, W.state_dim
    fock = build_fock(d, degree)
    dim = fock.dim

    step = None
    for i in range(d):
        term = sp.kron(fock.creation_right[i], sp.csr_matrix(W.a_blocks[i]))
        step = term if step is None else step + term
    step = step.tocsr()

    slab = np.zeros((dim * n1, W.in_dim), dtype=np.complex128)
    for j in range(1, d + 1):
        iw = fock.index[(j,)]
        slab[iw * n1 : (iw + 1) * n1, :] = W.b_block(j)
    acc = slab.copy()
    for _ in range(degree):
        slab = step @ slab
        acc += slab

    coeffs = {(): W.d.copy()}
    for word, iw in fock.index.items():
        if not word:
            continue
        coeffs[word] = W.c @ acc[iw * n1 : (iw + 1) * n1, :]
    return NCSeries(d, W.in_dim, W.out_dim, degree, coeffs)


def is_coisometric(W: Colligation, tol: float = 1e-10):
    """Whether W W* is the identity, with the residual norm."""
    mat = W.matrix()
    resid = spectral_norm(mat @ mat.conj().T - np.eye(mat.shape[0]))
    return resid <= tol, float(resid)


def unobservable_subspace(W: Colligation, rank_tol: float = RANK_TOL) -> OrthonormalBasis:
    """Basis of the intersection of the kernels of C @ (state word products).

    Equivalently the largest subspace of ker(C) invariant under every state
    block, computed as the orthogonal complement of the smallest
    adjoint-block-invariant subspace containing the range of C*.  The
    colligation is observable exactly when the result is empty.
    """
    adjoints = [blk.conj().T for blk in W.a_blocks]
    reach = smallest_invariant_subspace(adjoints, W.c.conj().T, rank_tol)
    return OrthonormalBasis(W.state_dim, orth_complement(reach))


@dataclass(frozen=True)
class StructureDecomposition:
    """Factors recovered from a co-isometric observable colligation.

    ``gamma`` maps the adjoint-defect coordinates of the recovered row
    contraction onto the output space (a co-isometry on success);
    ``sigma_tilde`` maps the input space onto defect coordinates (unitary on
    success).  Residuals report the feedthrough identity and the full
    block-matrix reconstruction.
    """

    gamma: np.ndarray = field(repr=False)
    sigma_tilde: np.ndarray = field(repr=False)
    d_residual: float
    reconstruction_residual: float
    hypotheses: dict


def _output_dim_admissible(k: int, d: int) -> bool:
    """Whether some state dimension n satisfies n(d-1) <= k <= n d."""
    if d == 1:
        return True
    n = -(-k // d)  # ceil(k/d)
    return n * (d - 1) <= k


def structure_decompose(
    W: Colligation, rank_tol: float = RANK_TOL, residual_tol: float = 1e-8
) -> StructureDecomposition:
    """Factor a co-isometric observable colligation through its basic row.

    Recovers the row contraction from the adjoint state blocks and expresses
    the colligation as the defect colligation of that row followed by a
    co-isometry on the output, with a unitary reshaping the input onto the
    defect range.  Requires the input dimension to equal the defect
    dimension of recovered row; the output-dimension window is recorded in
    the hypothesis report but not enforced.
    """
    from .errors import DecompositionFailed

    row = RowContraction(tuple(blk.conj().T for blk in W.a_blocks))
    pair = defects(row, rank_tol)
    coiso, coiso_res = is_coisometric(W)
    observable = unobservable_subspace(W, rank_tol).dim == 0
    hypotheses = {
        "coisometric": coiso,
        "coisometry_residual": coiso_res,
        "observable": observable,
        "input_dim": W.in_dim,
        "defect_dim": pair.basis_D.dim,
        "output_dim_admissible": _output_dim_admissible(W.out_dim, W.arity),
    }
    if not coiso or not observable:
        raise HypothesisViolated(f"colligation hypotheses fail: {hypotheses}")
    if W.in_dim != pair.basis_D.dim:
        raise HypothesisViolated(
            f"input dimension {W.in_dim} differs from defect dimension "
            f"{pair.basis_D.dim}"
        )

    q_in = pair.basis_D.vectors
    q_out = pair.basis_Dstar.vectors
    sigma_tilde = q_in.conj().T @ pair.D_pinv @ W.b
    gamma = W.c @ pair.Dstar_pinv @ q_out

    unit_res = spectral_norm(
        sigma_tilde.conj().T @ sigma_tilde - np.eye(W.in_dim)
    )
    coiso_gamma_res = spectral_norm(
        gamma @ gamma.conj().T - np.eye(W.out_dim)
    )
    if max(unit_res, coiso_gamma_res) > 1e-9:
        raise DecompositionFailed(
            f"factor residuals too large: sigma {unit_res:.3e}, "
            f"gamma {coiso_gamma_res:.3e}"
        )

    row_mat = row.row()
    d_residual = spectral_norm(
        W.d + gamma @ q_out.conj().T @ row_mat @ q_in @ sigma_tilde
    )
    rec = Colligation(
        a_blocks=W.a_blocks,
        b=pair.D @ q_in @ sigma_tilde,
        c=gamma @ q_out.conj().T @ pair.Dstar,
        d=-gamma @ q_out.conj().T @ row_mat @ q_in @ sigma_tilde,
    )
    reconstruction_residual = spectral_norm(W.matrix() - rec.matrix())
    if reconstruction_residual > residual_tol:
        raise DecompositionFailed(
            f"reconstruction residual {reconstruction_residual:.3e}"
        )
    return StructureDecomposition(
        gamma=gamma,
        sigma_tilde=sigma_tilde,
        d_residual=float(d_residual),
        reconstruction_residual=float(reconstruction_residual),
        hypotheses=hypotheses,
    )


def make_defect_constrained(n: int, d: int, k: int) -> RowContraction:
    """Row contraction on an n-dimensional space with defect dimension k.

    Valid for ``n(d-1) <= k <= n d``: the first block projects onto the
    first ``n d - k`` coordinates and the remaining blocks vanish.
    """
    if n < 0 or d < 1:
        raise OutOfRange("need n >= 0 and d >= 1")
    if not n * (d - 1) <= k <= n * d:
        raise OutOfRange(f"defect dimension {k} outside [{n * (d - 1)}, {n * d}]")
    m = n * d - k
    proj = np.zeros((n, n), dtype=np.complex128)
    for i in range(m):
        proj[i, i] = 1.0
    blocks = [proj] + [np.zeros((n, n), dtype=np.complex128) for _ in range(d - 1)]
    return RowContraction(tuple(blocks))
