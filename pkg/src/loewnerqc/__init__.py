"""Loewner chains, quasiconformal extensions and dilatation verification."""

from .analytic import (
    AnalyticMap,
    MoebiusTransform,
    TaylorCoefficients,
    cardioid_map,
    cayley,
    cayley_map,
    half_plane_map,
    identity_map,
    inverse_cayley,
    koebe,
    koebe_map,
    koebe_transform,
    polynomial_map,
    quadratic_map,
    root_scaled_koebe,
    rotate_map,
    scaled_koebe,
    sector_map,
    taylor_coefficients,
)
from .beltrami import (
    DilatationReport,
    GridSpec,
    PlaneMap,
    beltrami_coefficient,
    compose_dilatation,
    jacobian,
    verify_quasiconformal,
    wirtinger,
)
from .criteria import (
    CriterionVerdict,
    DiskGrid,
    SubclassLabel,
    ahlfors_becker_check,
    becker_to_sector,
    betker_sector_constant,
    classify_subclass,
    fkz_extension_constant,
    pre_schwarzian,
    schwarzian,
    schwarzian_norm_disk,
    strongly_starlike_order,
    sugawa_check,
)
from .loewner import (
    BerksonPortaData,
    EvolutionFamily,
    HerglotzField,
    LoewnerChain,
    chain_from_evolution,
    evolution_from_chain,
    herglotz_from_chain,
    schramm_field,
    solve_chordal_ode,
    solve_radial_ode,
)
from .qcext import (
    ChainSpec,
    ExtensionMap,
    PipelineResult,
    ahlfors_weill_extension,
    becker_extension,
    build_chain,
    chordal_extension,
    chordal_parabola_chain,
    chordal_translation_chain,
    explicit_examples,
    extension_pipeline,
    radial_extension_with_tau,
)

__version__ = "0.1.0"
