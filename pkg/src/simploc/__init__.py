"""Finite simplicial sets, Eilenberg-MacLane models, twisted products,
Postnikov stages and p-local models with explicit size bounds."""

__version__ = "0.1.0"

from .groups import FiniteAbelianGroup
from .sset import (
    BudgetExceeded,
    FinSimplicialSet,
    MonotoneMap,
    SimplexRef,
    SimplicialError,
    SimplicialMap,
    boundary_simplex,
    check_simplicial_identities,
    point,
    product,
    skeleton,
    sphere,
    standard_simplex,
)
from .homology import (
    HomologyGroup,
    HomologyProfile,
    homology,
    homology_iso_report,
    invariants,
    local_homology,
    normalized_chain_complex,
)
from .em import Cochain, EMModel, build_em_skeleton, em_cardinality, extend_free_labels, is_cocycle
from .twist import canonical_tau, check_twisting_axioms, e_as_twisted_product_iso, twisted_product
from .postnikov import (
    CocycleMap,
    hurewicz_stage2,
    pipeline,
    prune,
    pullback_stage,
    verify_homology_iso,
)
from .bounds import BoundConfig, final_bound, homotopy_order_bound, stage_size_bound
from .io import parse_kinv, parse_profile, parse_sset, read_sset, serialize_sset


def corpus_path(name: str):
    """Path of a shipped corpus file, e.g. ``corpus_path("delta2.sset")``."""
    from importlib.resources import files

    return files(__name__) / "corpus" / name
