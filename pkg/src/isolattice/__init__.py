"""Exact lattice calculus for isogeny kernels, Galois-action transport,
and polarization pullback/pushforward, with named reproducible scenarios."""

from .errors import (
    DimensionMismatchError,
    InsufficientPrecisionError,
    InvalidTypeVectorError,
    IsolatticeError,
    NoPushforwardError,
    NotAPolarizationLatticeError,
    NotOverBaseError,
    NotStableError,
    RankDeficientError,
    SingularMatrixError,
    UnknownScenarioError,
    UnsatisfiableFamilyError,
    UnsupportedPolarizationTypeError,
    WireParseError,
)
from .galois import (
    ConjugationReport,
    EntryRule,
    GaloisElement,
    MatrixFamily,
    SideCondition,
    conjugate,
    const,
    cyclotomic_character,
    enumerate_family,
    fixed_subspace,
    free,
    is_stable,
    multiple_of_prime,
    param,
    required_precision,
    sample_family,
    verify_image_shape,
)
from .lattices import (
    AbelianGroupInvariants,
    KernelData,
    LatticeMatrix,
    canonicalize,
    compose,
    contains,
    index_over_base,
    kernel_structure,
    lattice_from_kernel,
    morphism_between,
    same_lattice,
)
from .linalg import (
    ExactRational,
    Matrix,
    ResidueInt,
    hnf_columns,
    invariant_factors,
    rat_inverse,
    snf,
)
from .polarization import (
    PolarizationDesc,
    PushforwardResult,
    dual_isogeny,
    gram_from_type,
    is_isotropic,
    lattice_of_polarization,
    polarization_type,
    pullback,
    pushforward,
    weil_pairing,
)
from .scenarios import ScenarioReport, ScenarioStep, list_scenarios, run_scenario
from .wire import WireDocument, decode, emit_document, encode, parse_document

__version__ = "0.1.0"
