"""Localized topological pressure, rotation sets, and equilibrium
states on one-sided subshifts of finite type."""

from .shift import (
    BowenParams,
    PeriodicOrbit,
    TransitionSystem,
    bowen_distance,
    count_admissible_words,
    enumerate_periodic_orbits,
    is_admissible,
    is_mixing,
    separated_cylinder_family,
    word_metric,
)
from .potentials import (
    FishGeometry,
    FishPotential,
    JointPotential,
    LocallyConstantPotential,
    fish_block_contribution,
    fish_lipschitz_constant,
    perturb_fish,
    truncate_to_locally_constant,
)
from .transfer import (
    MarkovEquilibrium,
    PotentialFamily,
    equilibrium_state,
    pressure,
    pressure_detail,
    pressure_gradient,
    pressure_hessian,
    rotation_vector,
)
from .rotation import (
    ConvexPolytope,
    FishVertexFan,
    RotationCloud,
    convex_hull,
    fish_star_points,
    fish_vertices,
    hull_membership,
    rotation_cloud,
    slice_interval,
)
from .localized import (
    AlphaScan,
    CountBracket,
    DualSolveResult,
    LocalizedQuery,
    RateSequence,
    direct_count,
    fish_counting_bound,
    localized_entropy_dual,
    localized_pressure_direct,
    localized_pressure_dual,
    variational_check,
)
from .gallery import GalleryReport, run_gallery

__version__ = "0.1.0"
