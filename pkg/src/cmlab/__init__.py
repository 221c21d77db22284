"""cmlab: a numerical laboratory for bilinear Fourier multipliers,
paraproducts, and the harmonic-analysis norms they act between, on a
periodic grid."""

from .grid import (
    Grid,
    GridMismatchError,
    SampledField,
    SpectralField,
    dft,
    idft,
    integrate,
    load_field,
    restrict,
    save_field,
    zero_pad,
)
from .timegrid import TimeGrid
from .weights import (
    AdmissibleWeight,
    RegularizedWeight,
    ResolutionOfUnity,
    check_admissible,
    check_symbol_estimates,
    make_log_weight,
    make_loglog_weight,
    regularize,
    weight_from_spec,
)
from .multipliers import (
    BilinearSymbol,
    LPFamily,
    apply_bilinear,
    apply_linear,
    bessel,
    builtin_symbol,
    cm_constant,
    cm_report,
    cm_scaling_report,
    j_w,
    j_w_inv,
    multiply_dealiased,
    p_t,
    q_t,
    split_sigma,
    standard_family,
)
from .spaces import (
    BMO_norm,
    H1_norm,
    bmo_norm,
    h1_norm,
    jw_norm,
    lp_norm,
    refined_sobolev_norm,
    triebel_norm,
    xw_norm,
)
from .paraproducts import (
    ParaproductSpec,
    calderon_reconstruct,
    calderon_weight,
    kato_ponce_ratio,
    pi,
    pi1,
    pi2,
    product_decompose,
)
from .carleson import (
    TentFunction,
    band_tent,
    bmo_carleson_ratio,
    carleson_embedding_ratio,
    carleson_norm,
    weighted_band_carleson,
)
from .harness import (
    INEQUALITY_IDS,
    RatioReport,
    emit,
    estimate_ratio,
    make_field,
    resolution_sweep,
)

__version__ = "0.1.0"
