"""Desk-scale laboratory for transversal tilings in k-partite blow-up graphs."""

from transtile.core import (
    Pattern,
    PartiteGraph,
    VertexId,
    VertexSetFamily,
    common_neighborhood,
    delta_star,
    density,
    is_transversal_copy,
)
from transtile.holes import (
    HoleCertificate,
    HoleReport,
    alpha_star_exact,
    alpha_star_lower_bound,
    certify_no_hole,
    verify_hole,
)
from transtile.generators import (
    GenSpec,
    complete_blowup,
    hole_suppressed_process,
    random_spanning_subgraph,
    rng_for,
    space_barrier,
    subseed,
)
from transtile.tiling import (
    MixedTiling,
    Tiling,
    TransversalCopy,
    check_appendix_invariants,
    exact_transversal_factor,
    find_transversal_cycle,
    find_transversal_path,
    greedy_clique_tiling,
    greedy_cycle_tiling,
    maximal_mixed_tiling,
)
from transtile.absorbing import (
    AbsorbParams,
    AbsorbingSet,
    Absorber,
    Connector,
    Fan,
    Template,
    build_absorbing_set,
    find_absorber,
    find_connector,
    find_fan,
    generate_template,
    is_reachable,
    verify_absorbing_property,
    verify_template,
)
from transtile.lab import ExperimentConfig, ResultRecord, emit_plot, run

__version__ = "0.1.0"

__all__ = [
    "Pattern",
    "PartiteGraph",
    "VertexId",
    "VertexSetFamily",
    "common_neighborhood",
    "delta_star",
    "density",
    "is_transversal_copy",
    "HoleCertificate",
    "HoleReport",
    "alpha_star_exact",
    "alpha_star_lower_bound",
    "certify_no_hole",
    "verify_hole",
    "GenSpec",
    "complete_blowup",
    "hole_suppressed_process",
    "random_spanning_subgraph",
    "rng_for",
    "space_barrier",
    "subseed",
    "MixedTiling",
    "Tiling",
    "TransversalCopy",
    "check_appendix_invariants",
    "exact_transversal_factor",
    "find_transversal_cycle",
    "find_transversal_path",
    "greedy_clique_tiling",
    "greedy_cycle_tiling",
    "maximal_mixed_tiling",
    "AbsorbParams",
    "AbsorbingSet",
    "Absorber",
    "Connector",
    "Fan",
    "Template",
    "build_absorbing_set",
    "find_absorber",
    "find_connector",
    "find_fan",
    "generate_template",
    "is_reachable",
    "verify_absorbing_property",
    "verify_template",
    "ExperimentConfig",
    "ResultRecord",
    "emit_plot",
    "run",
    "__version__",
]
