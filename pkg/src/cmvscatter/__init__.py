"""cmvscatter: forward and inverse scattering for CMV matrices.

From Verblunsky coefficients to the unimodular scattering function and back
through dense Hankel solves, with regularity diagnostics and the determinant
identity tying the two sides together.
"""

from .circle import (
    CircleFunction,
    CircleGrid,
    DiskFunction,
    conjugate_function,
    default_grid,
    fourier_coeffs,
    herglotz_from_density,
    outer_from_modulus_squared,
    read_circle_csv,
    write_circle_csv,
)
from .classify import (
    ClassReport,
    a2_constant,
    besov_half_norm,
    classify,
    jacobi_verblunsky,
    widom_det,
    winding_index,
)
from .errors import (
    ConditioningWarning,
    NearSingularError,
    NumericalError,
    RegularityError,
)
from .hankel import (
    AakData,
    HankelOp,
    RegularityReport,
    aak_data,
    hankel_from_symbol,
    phi_h,
    psi_h,
    regularity_test,
    solve_block,
)
from .inverse import (
    GlmMatrix,
    RecoveryReport,
    glm_factorization_residual,
    glm_matrix,
    l_matrix,
    recover_verblunsky,
)
from .opuc import (
    CmvMatrix,
    LaurentBasis,
    VerblunskySeq,
    build_cmv,
    cmv_recursion_check,
    laurent_basis,
    schur_caratheodory,
    spectral_density,
)
from .scatter import (
    KernelPair,
    PhiPsi,
    ScatteringData,
    forward_scatter,
    kernels_from_spectral,
    phi_from_R,
    szego_asymptotics_residual,
)

__version__ = "0.1.0"
