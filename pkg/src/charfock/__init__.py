"""Numerical calculus of characteristic functions for row contractions
and contractive liftings on truncated Fock spaces: defect operators,
colligation transfer symbols, lifting symbols, coincidence/equivalence
solvers, the co-isometric observable structure theorem, and
disc-automorphism transforms.
"""

from .colligation import (
    Colligation,
    is_coisometric,
    make_defect_constrained,
    structure_decompose,
    transfer_oracle,
    transfer_symbol,
    unobservable_subspace,
)
from .equiv import (
    EquivalenceResult,
    coincidence_solve,
    colligation_state_unitary,
    equivalence_solve,
    rowcon_unitary_equiv,
)
from .errors import CharfockError
from .fockseries import (
    NCSeries,
    TruncatedFock,
    build_fock,
    enumerate_words,
    eval_tail_bound,
    multianalytic_matrix,
    multianalytic_norm,
    series_apply_output,
    series_eval_scalar,
    series_from_fock_operator,
    series_max_dev,
)
from .lifting import (
    GammaData,
    Lifting,
    SigmaMap,
    build_lifting,
    extract_gamma,
    lifting_char_decomposed,
    lifting_char_direct,
    lifting_colligation,
    minimality_check,
    norm_bound_check,
    resolving_check,
    sigma_map,
)
from .mobius import (
    MobiusData,
    mobius_contraction,
    mobius_lifting,
    mobius_point,
    verify_cf_relation,
    verify_lifting_cf,
    z_unitaries,
)
from .numlin import (
    OrthonormalBasis,
    hermitian_eig,
    pinv,
    polar_unitary,
    procrustes,
    psd_sqrt,
    range_onb,
)
from .rowcon import (
    DefectPair,
    RowContraction,
    char_symbol,
    char_symbol_oracle,
    cnc_subspace,
    defects,
    is_cnc,
    popescu_colligation,
    validate,
)

__version__ = "0.1.0"
