"""Oversampled affine frames and their direct-sum liftings, verified at
desk scale on an exact piecewise-constant function model.

The package decides admissibility of an oversampling matrix for an
expansive integer dilation, builds the coset/dual-coset systems of the
induced finite quotient group together with their Fourier matrix and
label permutations, realizes the affine operator algebra and its lift to
the p-fold direct sum on exact rational geometry, and checks the
frame-transfer facts (projection, bound equality, orthogonal splitting)
on truncated systems.
"""

from .errors import (
    EmptyTestSet,
    IndexOutOfRange,
    InvalidGeometry,
    NotAdmissible,
    NotAPermutation,
    NotExpansive,
    ShapeMismatch,
    SingularMatrix,
    SuperframeError,
    SystemTooLarge,
    UnsupportedDimension,
)
from .intlin import (
    IntMatrix,
    LatticeBasis,
    RatMatrix,
    determinant,
    inverse_rational,
    lattice_equal,
    lattice_intersection,
    smith_normal_form,
)
from .quotient import (
    AdmissibilityReport,
    CosetSystem,
    OversamplingPair,
    check_admissible,
    coset_representatives,
    dual_representatives,
    duality_matrix,
    residue_index,
    sigma,
    sigma_star,
)
from .funcspace import (
    AffineUnitary,
    PiecewiseFunction,
    dilate,
    haar,
    indicator_interval,
    indicator_polygon,
    inner_product,
    parse_function,
    random_step,
    scale_p,
    translate,
    zero,
)
from .superspace import (
    SuperVector,
    decompose,
    embed_s,
    embed_s_prime,
    reassemble,
    super_dilate,
    super_inner_product,
    super_norm,
    super_scale_p,
    super_translate,
)
from .frames import (
    BASE,
    OVERSAMPLED,
    SUPER,
    FrameReport,
    GramStats,
    SystemKind,
    TruncationSpec,
    WaveletFamily,
    frame_bounds_estimate,
    frame_sum,
    gram_matrix,
    project_first,
    system_element,
)

__version__ = "0.1.0"
