"""Exact barcodes of filtered chain complexes over Novikov fields."""

__version__ = "0.1.0"

from .coefficients import (
    ConfigurationError,
    CyclotomicRational,
    DomainError,
    ExponentGroup,
    NovikovScalar,
    PreconditionError,
    invert,
    solve_perturbed_unity_root,
    valuation,
)
from .filtered_linalg import (
    FilteredMap,
    FilteredSpace,
    SVDResult,
    check_svd,
    complete_orthogonal,
    filtration_of,
    is_orthogonal,
    optimal_pair,
    reduce_to_zero_level,
    svd,
)
from .complexes import (
    ConeComplex,
    FilteredChainComplex,
    build_cone,
    cone_homotopy_iso,
    cone_tensor_iso_check,
    double_map,
    tensor_product,
    verify_complex,
)
from .barcode import (
    Bar,
    Barcode,
    barcode,
    barcode_of,
    compare_barcodes,
    stability_probe,
    tensor_barcode,
)
from .cyclic import (
    CyclicActionData,
    PTupleSVD,
    divisibility_invariant,
    eigenspace_decomposition,
    generate_power_p_fixture,
    invert_perturbed,
    maschke_complement,
    p_cyclic_svd,
    repair_to_group_action,
    verify_p_tuple_multiplicity,
)
from .eggbeater import (
    EggBeaterModel,
    SignSequence,
    build_model,
    cz_index,
    egg_cone_report,
    product_cone_crosscheck,
    product_multiplicity,
    q_matrix,
    quantum_betti,
)
