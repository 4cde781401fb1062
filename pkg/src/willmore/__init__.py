"""Minimal surfaces with embedded planar ends, Willmore energy, and
numerical index bounds for their inversions."""

from .errors import (
    ConfigError,
    DegenerateMetric,
    GramIllConditioned,
    IllConditionedRoots,
    ImmersionLost,
    LogarithmicObstruction,
    NoConvergence,
    NonSimplePole,
    NullConditionViolated,
    OriginOnSurface,
    PoleProximity,
    QuadratureNotConverged,
    WillmoreError,
    ZeroResidueEnd,
)
from .rational import (
    INFINITY,
    ComplexPolynomial,
    PoleRecord,
    RationalFunction,
    antiderivative,
    derivative,
    evaluate,
    find_poles,
    is_infinity,
    residue_sum,
)
from .charts import Chart, IDENTITY, ZETA, chart_at
from .fields import ConstantField, ScalarField, SpherePolynomial, sphere_poly_basis
from .geometry import (
    CompositeW,
    InvertedSurface,
    MinimalChartSurface,
    NormalGraphSurface,
    boundary_one_form,
    composite_w,
    frame_at,
    invert,
    laplace_beltrami,
    mean_curvature_of,
    surface_point_frame,
    total_curvature,
    willmore_energy,
    willmore_residual,
)
from .quadrature import QuadratureSpec
from .weierstrass import (
    EndData,
    MinimalImmersion,
    build_from_f,
    build_from_gauss_data,
    four_end_immersion,
    plane_immersion,
    quantization_report,
    residue_norm,
)
from .variation import (
    QuadraticFormAssembly,
    SpectralReport,
    TestBasis,
    assemble_Q,
    fd_hessian_oracle,
    inertia,
    mobius_invariance_check,
    q_value,
    polynomial_test_basis,
)
from .s3 import (
    EigenLine,
    S3MinimalSurface,
    clifford_torus,
    great_sphere,
    jacobi_spectrum,
    willmore_index_s3,
)

__version__ = "0.1.0"
