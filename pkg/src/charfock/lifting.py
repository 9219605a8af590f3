"""Block-lower-triangular liftings of a row contraction, the link
contraction extracted from the off-diagonal blocks, minimality and
resolving checks, the two computations of the lifting characteristic
symbol, the associated colligation, and the evaluation norm bound.

A lifting stacks a base row contraction C over an added row contraction A
with coupling blocks B underneath the diagonal.  The coupling is governed
by a contraction ("link") from the adjoint defect range of A to the defect
range of C; all symbols are reported in defect orthonormal coordinates.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .colligation import Colligation
from .errors import (
    ArityNotOne,
    GammaNotContractive,
    NotWellDefined,
    ResidualTooLarge,
    ShapeMismatch,
)
from .fockseries import NCSeries, enumerate_words, eval_tail_bound, series_eval_scalar
from .numlin import (
    RANK_TOL,
    OrthonormalBasis,
    as_matrix,
    orth_cols,
    orth_complement,
    psd_sqrt_with_basis,
    smallest_invariant_subspace,
    spectral_norm,
)
from .rowcon import RowContraction, _char_symbol_noflag, defects

__all__ = [
    "Lifting",
    "GammaData",
    "SigmaMap",
    "ResolvingReport",
    "NormBoundReport",
    "coordinate_permutation",
    "build_lifting",
    "extract_gamma",
    "resolving_check",
    "minimality_check",
    "sigma_map",
    "lifting_char_decomposed",
    "lifting_char_direct",
    "lifting_colligation",
    "norm_bound_check",
]


@dataclass(frozen=True)
class Lifting:
    """Row contraction C lifted by A with lower-left coupling blocks."""

    C: RowContraction
    A: RowContraction
    Bblocks: tuple = field(repr=False)

    def __post_init__(self):
        if self.C.arity != self.A.arity:
            raise ShapeMismatch("base and added rows must share the arity")
        blocks = tuple(as_matrix(b) for b in self.Bblocks)
        if len(blocks) != self.C.arity:
            raise ShapeMismatch("need one coupling block per letter")
        for b in blocks:
            if b.shape != (self.A.dim, self.C.dim):
                raise ShapeMismatch("coupling blocks must map base into added space")
        object.__setattr__(self, "Bblocks", blocks)

    @property
    def arity(self) -> int:
        return self.C.arity

    @property
    def dim_c(self) -> int:
        return self.C.dim

    @property
    def dim_a(self) -> int:
        return self.A.dim

    def block(self, j: int) -> np.ndarray:
        """Assembled j-th (1-based) block of the lifted row."""
        top = np.hstack([self.C.blocks[j - 1], np.zeros((self.dim_c, self.dim_a))])
        bottom = np.hstack([self.Bblocks[j - 1], self.A.blocks[j - 1]])
        return np.vstack([top, bottom])

    def E(self) -> RowContraction:
        """The lifted row contraction on the direct sum space."""
        return RowContraction(tuple(self.block(j) for j in range(1, self.arity + 1)))

    def b_row(self) -> np.ndarray:
        """The coupling row as one matrix from the d-fold base sum."""
        return np.hstack(self.Bblocks)


@dataclass(frozen=True)
class GammaData:
    """Link contraction in defect coordinates with its adjoint defect.

    ``gamma`` maps adjoint-defect coordinates of A to defect coordinates of
    C; ``Dstar_gamma`` is the square root of (I - gamma gamma*) expressed on
    the defect coordinates of C; ``basis_Dstar_gamma`` spans its range
    (again in defect coordinates of C); ``residual`` reports the defect of
    the defining relation between the coupling row and the link.
    """

    gamma: np.ndarray = field(repr=False)
    Dstar_gamma: np.ndarray = field(repr=False)
    basis_Dstar_gamma: OrthonormalBasis
    residual: float


@dataclass(frozen=True)
class SigmaMap:
    """Unitary from lifted-defect coordinates to the split target.

    ``sigma`` has the link-adjoint-defect coordinates on top of the defect
    coordinates of A; ``split`` is the row index separating the two.
    """

    sigma: np.ndarray = field(repr=False)
    split: int
    unitarity_residual: float


@dataclass(frozen=True)
class ResolvingReport:
    resolving: bool
    dim_joint_kernel_link: int
    dim_joint_kernel_defect: int
    witness: np.ndarray | None = None
    witness_word: tuple | None = None


@dataclass(frozen=True)
class NormBoundReport:
    lam: complex
    lhs: float
    rhs: float
    tail: float
    slack: float
    ok: bool


def coordinate_permutation(dim_c: int, dim_a: int, arity: int) -> np.ndarray:
    """Permutation from the d-fold sum of (base + added) coordinates to the
    block ordering (d-fold base) followed by (d-fold added).

    This fixed matrix mediates between the ordering in which the lifted row
    acts and the ordering in which the split block formulas are written.
    """
    ne = dim_c + dim_a
    total = arity * ne
    perm = np.zeros((total, total), dtype=np.complex128)
    for j in range(arity):
        for i in range(dim_c):
            perm[j * dim_c + i, j * ne + i] = 1.0
        for i in range(dim_a):
            perm[arity * dim_c + j * dim_a + i, j * ne + dim_c + i] = 1.0
    return perm


def build_lifting(
    C: RowContraction,
    A: RowContraction,
    gamma,
    rank_tol: float = RANK_TOL,
    tol: float = 1e-10,
) -> Lifting:
    """Assemble the lifting whose coupling realises a given link contraction.

    ``gamma`` is given in defect coordinates (adjoint defect of A to defect
    of C); the coupling row is the adjoint defect of A times the adjoint of
    the link times the defect of C.
    """
    gamma = as_matrix(gamma)
    pc = defects(C, rank_tol)
    pa = defects(A, rank_tol)
    if gamma.shape != (pc.basis_D.dim, pa.basis_Dstar.dim):
        raise ShapeMismatch(
            f"link shape {gamma.shape} does not match defect dimensions "
            f"({pc.basis_D.dim}, {pa.basis_Dstar.dim})"
        )
    if spectral_norm(gamma) > 1.0 + tol:
        raise GammaNotContractive(f"link norm {spectral_norm(gamma):.6e} > 1")
    gamma_amb = pc.basis_D.vectors @ gamma @ pa.basis_Dstar.vectors.conj().T
    b_row = pa.Dstar @ gamma_amb.conj().T @ pc.D
    nc = C.dim
    blocks = tuple(b_row[:, j * nc : (j + 1) * nc] for j in range(C.arity))
    lifted = Lifting(C, A, blocks)
    lifted.E()  # validates the row-contraction condition via construction
    return lifted


class _Frame:
    """Shared defect data for one lifting (internal)."""

    def __init__(self, lifting: Lifting, rank_tol: float):
        self.lifting = lifting
        self.rank_tol = rank_tol
        self.E = lifting.E()
        self.pc = defects(lifting.C, rank_tol)
        self.pa = defects(lifting.A, rank_tol)
        self.pe = defects(self.E, rank_tol)

        qc = self.pc.basis_D.vectors
        qa_star = self.pa.basis_Dstar.vectors
        b_row = lifting.b_row()
        gamma_amb = self.pc.D_pinv @ b_row.conj().T @ self.pa.Dstar_pinv
        self.gamma = qc.conj().T @ gamma_amb @ qa_star
        self.gamma_amb = qc @ self.gamma @ qa_star.conj().T
        self.gamma_residual = spectral_norm(
            b_row.conj().T - self.pc.D @ self.gamma_amb @ self.pa.Dstar
        )
        scale = 1.0 + spectral_norm(b_row)
        if self.gamma_residual > 1e-9 * scale:
            raise ResidualTooLarge(
                f"link relation residual {self.gamma_residual:.3e}; the lifted "
                "row may not be contractive or the rank cut is wrong"
            )
        rc = self.gamma.shape[0]
        self.dstar_gamma, self.basis_sg, _ = psd_sqrt_with_basis(
            np.eye(rc) - self.gamma @ self.gamma.conj().T, rank_tol, floor=1.0
        )

    def sigma(self):
        """Unitary from lifted-defect coordinates to split coordinates."""
        lift = self.lifting
        nc, na, d = lift.dim_c, lift.dim_a, lift.arity
        qc = self.pc.basis_D.vectors
        qa = self.pa.basis_D.vectors
        perm = coordinate_permutation(nc, na, d)
        dsg_amb = qc @ self.dstar_gamma @ qc.conj().T
        top = np.hstack(
            [dsg_amb @ self.pc.D, np.zeros((d * nc, d * na), dtype=np.complex128)]
        )
        bottom = np.hstack(
            [
                -lift.A.row().conj().T @ self.gamma_amb.conj().T @ self.pc.D,
                self.pa.D,
            ]
        )
        m_amb = np.vstack([top, bottom]) @ perm

        de2 = self.pe.D @ self.pe.D
        defect = spectral_norm(m_amb.conj().T @ m_amb - de2)
        if defect > 1e-9 * (1.0 + spectral_norm(de2)):
            raise NotWellDefined(
                f"split map does not preserve the lifted defect norm "
                f"(residual {defect:.3e}); link extraction or minimality fails"
            )

        q_sg_amb = qc @ self.basis_sg.vectors
        rows_top = q_sg_amb.conj().T @ top @ perm
        rows_bottom = qa.conj().T @ bottom @ perm
        qe = self.pe.basis_D.vectors
        right = self.pe.D_pinv @ qe
        sigma = np.vstack([rows_top, rows_bottom]) @ right

        r_e = qe.shape[1]
        if sigma.shape[0] != r_e:
            raise NotWellDefined(
                f"split target dimension {sigma.shape[0]} differs from lifted "
                f"defect dimension {r_e}"
            )
        unit = max(
            spectral_norm(sigma.conj().T @ sigma - np.eye(r_e)),
            spectral_norm(sigma @ sigma.conj().T - np.eye(r_e)),
        )
        if unit > 1e-9:
            raise NotWellDefined(f"split map unitarity residual {unit:.3e}")
        return SigmaMap(sigma=sigma, split=self.basis_sg.dim, unitarity_residual=float(unit))


def extract_gamma(lifting: Lifting, rank_tol: float = RANK_TOL) -> GammaData:
    """Link contraction of a lifting, in defect coordinates.

    Solves the defining relation through pseudo-inverses on the defect
    ranges and reports its residual; a residual beyond tolerance signals a
    non-contractive lifted row or a misdetected numerical rank.
    """
    frame = _Frame(lifting, rank_tol)
    return GammaData(
        gamma=frame.gamma,
        Dstar_gamma=frame.dstar_gamma,
        basis_Dstar_gamma=frame.basis_sg,
        residual=float(frame.gamma_residual),
    )


def resolving_check(lifting: Lifting, rank_tol: float = RANK_TOL) -> ResolvingReport:
    """Whether vanishing of the link-filtered adjoint orbit forces vanishing
    of the full defect orbit.

    Compares the largest adjoint-invariant subspace inside the kernel of
    (link o adjoint defect) with the one inside the kernel of the adjoint
    defect alone; the two coincide exactly when the link is resolving.  A
    failing check ships a witness vector and a word exposing it.
    """
    frame = _Frame(lifting, rank_tol)
    A = lifting.A
    adjoints = [b.conj().T for b in A.blocks]

    def largest_invariant_kernel(op):
        reach = smallest_invariant_subspace(A.blocks, op.conj().T, rank_tol)
        return orth_complement(reach)

    k1 = largest_invariant_kernel(frame.gamma_amb @ frame.pa.Dstar)
    k2 = largest_invariant_kernel(frame.pa.Dstar)
    if k1.shape[1] == k2.shape[1]:
        return ResolvingReport(True, k1.shape[1], k2.shape[1])

    # any direction of K1 orthogonal to K2 witnesses the failure
    resid = k1 - k2 @ (k2.conj().T @ k1)
    wit = orth_cols(resid, rank_tol)[:, 0]
    word = None
    frontier = [((), wit)]
    for _ in range(A.dim + 1):
        nxt = []
        for w, vec in frontier:
            if np.linalg.norm(frame.pa.Dstar @ vec) > 1e-8:
                word = w
                break
            for i, adj in enumerate(adjoints, start=1):
                nxt.append((w + (i,), adj @ vec))
        if word is not None:
            break
        frontier = nxt
    return ResolvingReport(False, k1.shape[1], k2.shape[1], wit, word)


def minimality_check(lifting: Lifting, rank_tol: float = RANK_TOL) -> bool:
    """Whether the lifted blocks applied to the base space span everything."""
    nc, na = lifting.dim_c, lifting.dim_a
    seed = np.vstack(
        [np.eye(nc, dtype=np.complex128), np.zeros((na, nc), dtype=np.complex128)]
    )
    blocks = [lifting.block(j) for j in range(1, lifting.arity + 1)]
    span = smallest_invariant_subspace(blocks, seed, rank_tol)
    return span.shape[1] == nc + na


def sigma_map(lifting: Lifting, rank_tol: float = RANK_TOL) -> SigmaMap:
    """The unitary reshaping lifted-defect coordinates onto the split target
    (link-adjoint-defect on top of the defect of the added row)."""
    if not minimality_check(lifting, rank_tol):
        warnings.warn("lifting is not minimal; split map may degenerate", stacklevel=2)
    return _Frame(lifting, rank_tol).sigma()


def _warn_if_not_minimal(lifting: Lifting, rank_tol: float):
    if not minimality_check(lifting, rank_tol):
        warnings.warn(
            "lifting is not minimal; characteristic identities are only "
            "guaranteed for minimal liftings",
            stacklevel=3,
        )


def lifting_char_decomposed(
    lifting: Lifting, degree: int, rank_tol: float = RANK_TOL
) -> NCSeries:
    """Lifting characteristic symbol via its factored form.

    The symbol is the row [adjoint-defect-of-link block, link composed with
    the characteristic symbol of the added row] composed with the split
    unitary; all in defect coordinates.
    """
    _warn_if_not_minimal(lifting, rank_tol)
    frame = _Frame(lifting, rank_tol)
    sig = frame.sigma()
    theta_a = _char_symbol_noflag(lifting.A, degree, rank_tol)
    r_c = frame.gamma.shape[0]
    r_sg = frame.basis_sg.dim
    left_const = frame.dstar_gamma @ frame.basis_sg.vectors
    zeros_left = np.zeros((r_c, r_sg), dtype=np.complex128)
    coeffs = {}
    for word in enumerate_words(lifting.arity, degree):
        left = left_const if not word else zeros_left
        row = np.hstack([left, frame.gamma @ theta_a.coeff(word)])
        coeffs[word] = row @ sig.sigma
    qe_dim = frame.pe.basis_D.dim
    return NCSeries(lifting.arity, qe_dim, r_c, degree, coeffs)


def lifting_char_direct(
    lifting: Lifting, degree: int, rank_tol: float = RANK_TOL
) -> NCSeries:
    """Lifting characteristic symbol assembled from the two displayed sums
    (base-space part and added-space part), bypassing the factored form.

    Must agree with :func:`lifting_char_decomposed` coefficientwise; the
    pairwise agreement is the executable content of the factorisation.
    """
    _warn_if_not_minimal(lifting, rank_tol)
    frame = _Frame(lifting, rank_tol)
    lift = lifting
    nc, na, d = lift.dim_c, lift.dim_a, lift.arity
    ne = nc + na
    pa, pc, pe = frame.pa, frame.pc, frame.pe
    qc = pc.basis_D.vectors

    # all coefficient formulas target the defect range of the base row
    gsd = qc.conj().T @ frame.gamma_amb @ pa.Dstar  # link after adjoint defect
    dc_coords = qc.conj().T @ pc.D
    ga_row = qc.conj().T @ frame.gamma_amb @ lift.A.row()
    da2 = pa.D @ pa.D

    adjprods = {(): np.eye(na, dtype=np.complex128)}
    for word in enumerate_words(d, degree):
        if word:
            adjprods[word] = lift.A.blocks[word[-1] - 1].conj().T @ adjprods[word[:-1]]

    right = pe.D_pinv @ pe.basis_D.vectors
    r_c = qc.shape[1]
    coeffs = {}
    for word in enumerate_words(d, degree):
        g = np.zeros((r_c, d * ne), dtype=np.complex128)
        for j in range(1, d + 1):
            c_cols = slice((j - 1) * ne, (j - 1) * ne + nc)
            a_cols = slice((j - 1) * ne + nc, j * ne)
            if not word:
                g[:, c_cols] = (
                    dc_coords[:, (j - 1) * nc : j * nc]
                    - gsd @ lift.Bblocks[j - 1]
                )
                g[:, a_cols] = -ga_row @ pa.D[:, (j - 1) * na : j * na]
            else:
                g[:, c_cols] = -gsd @ adjprods[word] @ lift.Bblocks[j - 1]
                head, rest = word[0], word[1:]
                g[:, a_cols] = (
                    gsd
                    @ adjprods[rest]
                    @ da2[(head - 1) * na : head * na, (j - 1) * na : j * na]
                )
        coeffs[word] = g @ right
    return NCSeries(d, pe.basis_D.dim, r_c, degree, coeffs)


def lifting_colligation(lifting: Lifting, rank_tol: float = RANK_TOL) -> Colligation:
    """Colligation whose transfer symbol is the lifting characteristic symbol.

    State space is the added space, input the lifted defect coordinates,
    output the defect coordinates of the base row; co-isometric always, and
    observable exactly when the lifting is minimal.
    """
    _warn_if_not_minimal(lifting, rank_tol)
    frame = _Frame(lifting, rank_tol)
    sig = frame.sigma()
    split = sig.split
    sigma_top, sigma_bottom = sig.sigma[:split, :], sig.sigma[split:, :]
    qa = frame.pa.basis_D.vectors
    qa_star = frame.pa.basis_Dstar.vectors
    astar_hat = qa_star.conj().T @ lifting.A.row() @ qa
    return Colligation(
        a_blocks=tuple(b.conj().T for b in lifting.A.blocks),
        b=frame.pa.D @ qa @ sigma_bottom,
        c=frame.gamma @ qa_star.conj().T @ frame.pa.Dstar,
        d=frame.dstar_gamma @ frame.basis_sg.vectors @ sigma_top
        - frame.gamma @ astar_hat @ sigma_bottom,
    )


def norm_bound_check(
    lifting: Lifting,
    lam: complex,
    degree: int = 40,
    rank_tol: float = RANK_TOL,
    slack_tol: float = 1e-8,
) -> NormBoundReport:
    """Single-variable evaluation bound for the lifting symbol.

    Checks that the norm of the symbol evaluated at a disc point does not
    exceed the norm of the link adjoint-defect plus the norm of the
    disc-automorphism image of the added operator, up to the documented
    truncation tail and a fixed slack.
    """
    if lifting.arity != 1:
        raise ArityNotOne("the evaluation bound is a one-variable statement")
    lam = complex(lam)
    frame = _Frame(lifting, rank_tol)
    theta = lifting_char_decomposed(lifting, degree, rank_tol)
    lhs = spectral_norm(series_eval_scalar(theta, lam))
    a = lifting.A.blocks[0]
    na = lifting.dim_a
    moved = (a - lam * np.eye(na)) @ np.linalg.inv(
        np.eye(na) - np.conj(lam) * a
    )
    rhs = spectral_norm(frame.dstar_gamma) + spectral_norm(moved)
    tail = eval_tail_bound(degree, abs(lam))
    slack = rhs + tail + slack_tol - lhs
    return NormBoundReport(
        lam=lam,
        lhs=float(lhs),
        rhs=float(rhs),
        tail=float(tail),
        slack=float(slack),
        ok=bool(slack >= 0.0),
    )
