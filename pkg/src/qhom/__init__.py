"""Exact-rational analysis of quasihomomorphism windows into symmetric
matrices: verification of the defect bound, structure mining of difference
sequences, and certified rank-2 approximation by a linear map."""

from .errors import (
    CertificationError,
    FormatError,
    HypothesisError,
    InconclusiveWindowError,
    NotQuasihomError,
    PreconditionError,
)
from .exact_linalg import (
    SymMat,
    Subspace,
    image,
    kernel,
    line_contained,
    matrix_from_literal,
    matrix_to_literal,
    perp,
    rank,
    subspace_intersection_dim,
    subspace_sum,
)
from .quasihom import (
    DefectReport,
    DeltaSeq,
    QuasiHomWindow,
    delta,
    normalize,
    reconstruct,
    verify_delta_form,
    verify_direct,
    window_from_payload,
    window_to_payload,
)
from .apap import (
    ApapStructure,
    EquivClosure,
    GcdReduction,
    block_sum,
    consecutive_sum_check,
    equiv_closure_oracle,
    equiv_related,
    gcd_reduce,
    is_apap,
    minimal_apap_period,
    residue_1_to_q,
    structure_of,
)
from .approximator import (
    ApproxCertificate,
    StructureFinding,
    approximate,
    certify,
    detect_structure,
    find_minimal_m,
    line_of,
    vm_dim,
)
from .generators import (
    FuzzReport,
    GenSpec,
    fuzz_theorem,
    gen_apap_candidate,
    gen_homomorphism,
    gen_line_perturbed,
    gen_periodic_apap,
    gen_rank1_sym,
)

__version__ = "0.1.0"
