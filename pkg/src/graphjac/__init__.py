"""Jacobians of random graphs with their duality pairings: exact extraction,
Wall/Miranda classification, closed-form predictions, and seeded Monte Carlo
over graphs and Haar-random symmetric p-adic matrices."""

__version__ = "0.1.0"

from .classify import (  # noqa: F401
    PairingClass,
    Symbol,
    aut_of_class,
    class_pairing,
    classify_odd_p,
    classify_p2,
    classify_pairing,
    classify_sylow,
    count_aut_pairing,
    enumerate_classes,
    is_isomorphic,
)
from .graphs import (  # noqa: F401
    Graph,
    GraphSampleConfig,
    graph_from_edge_list,
    is_connected,
    laplacian,
    reduced_laplacian,
    sample_gnq,
)
from .intlinalg import (  # noqa: F401
    SingularMatrixError,
    SnfResult,
    cokernel_invariants,
    determinant,
    rational_inverse,
    smith_normal_form,
)
from .pairings import (  # noqa: F401
    DegeneratePairingError,
    DisconnectedGraphError,
    FiniteAbelianGroup,
    NoCatalogMatchError,
    OrderExceedsBoundError,
    PairingGram,
    SylowPairing,
    combine_sylow,
    jacobian_with_pairing,
    pairing_from_matrix,
    sylow_split,
)
from .padic import (  # noqa: F401
    PRECISION_EXCEEDED,
    PadicSymMatrix,
    cokernel_pairing,
    count_surjections,
    estimate_mu_n,
    estimate_surjection_moment,
    sample_sym,
    sample_sym_zerosum,
)
from .theory import (  # noqa: F401
    PartitionType,
    Prediction,
    c_p,
    cyclic_p_probability,
    cyclic_probability_global,
    expected_surjections,
    gaussian_binomial,
    mu_measure,
    mu_n_finite,
    mu_n_zerosum,
    odd_cyclic_probability,
    rank_moment,
    trivial_p_probability,
)
