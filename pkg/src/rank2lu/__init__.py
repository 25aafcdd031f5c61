"""Local-unitary equivalence decisions for rank-two bipartite mixed states.

The package handles mixed states rho = lambda1 |v1><v1| + lambda2 |v2><v2|
whose eigenvector coefficient matrices A, B satisfy A^A = B^B and
AA^ = BB^.  For that class the invariant fingerprint (purity, trace powers
of AB^, rank profile) is a complete local-unitary invariant; decisions are
confirmed constructively through an SVD canonical form that also yields an
explicit witness, and a brute-force descent oracle cross-checks everything.
"""

from . import canonical, engine, errors, invariants, kernels, lab, numerics, statefile, states
from .canonical import (
    CanonicalComparison,
    CanonicalForm,
    DeltaBlock,
    LUWitness,
    build_witness,
    canonicalize,
    compare_canonical,
    standard_form,
    unitary_eig,
)
from .engine import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNDECIDED,
    SloccWitness,
    Verdict,
    decide_lu,
    decide_slocc,
    verify_lu_witness,
)
from .invariants import (
    Fingerprint,
    FingerprintComparison,
    align_phase,
    compare_fingerprints,
    fingerprint,
)
from .lab import (
    OracleConfig,
    OracleResult,
    concurrence_2x2,
    equivalent_pair,
    haar_unitary,
    inequivalent_pair,
    oracle_search,
    random_class_state,
    rotation_reflection_family,
    slocc_equivalent_pair,
)
from .numerics import DEFAULT_TOL, ToleranceConfig
from .states import (
    BipartiteShape,
    DensityMatrix,
    RankTwoState,
    apply_local_unitary,
    assemble,
    build_w_matrix,
    check_class_condition,
    decompose,
)

__version__ = "0.1.0"

__all__ = [
    "canonical",
    "engine",
    "errors",
    "invariants",
    "kernels",
    "lab",
    "numerics",
    "statefile",
    "states",
    "CanonicalComparison",
    "CanonicalForm",
    "DeltaBlock",
    "LUWitness",
    "build_witness",
    "canonicalize",
    "compare_canonical",
    "standard_form",
    "unitary_eig",
    "EQUIVALENT",
    "NOT_EQUIVALENT",
    "UNDECIDED",
    "SloccWitness",
    "Verdict",
    "decide_lu",
    "decide_slocc",
    "verify_lu_witness",
    "Fingerprint",
    "FingerprintComparison",
    "align_phase",
    "compare_fingerprints",
    "fingerprint",
    "OracleConfig",
    "OracleResult",
    "concurrence_2x2",
    "equivalent_pair",
    "haar_unitary",
    "inequivalent_pair",
    "oracle_search",
    "random_class_state",
    "rotation_reflection_family",
    "slocc_equivalent_pair",
    "DEFAULT_TOL",
    "ToleranceConfig",
    "BipartiteShape",
    "DensityMatrix",
    "RankTwoState",
    "apply_local_unitary",
    "assemble",
    "build_w_matrix",
    "check_class_condition",
    "decompose",
    "__version__",
]
