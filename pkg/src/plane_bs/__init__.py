"""Bernstein-Sato roots, jumping numbers and zeta poles of plane curves from resolution data."""

from .curve_input import (
    BranchSpec,
    CharSequence,
    CurveSpec,
    IncompatibleContacts,
    NotAMember,
    NumericalSemigroup,
    PuiseuxPairs,
    bounded_representation,
    chars_to_pairs,
    milnor_number_irreducible,
    pairs_to_chars,
    pairs_to_semigroup,
    semigroup_membership,
)
from .resolution_graph import (
    DualGraph,
    GraphError,
    NotAdjacent,
    NotExceptional,
    build_from_branch,
    build_from_curve,
    validate_graph,
)
from .forms_residues import (
    FormExponent,
    ResidueVector,
    find_maximal_admissible_chain,
    normalize_form,
    residues,
    sigma,
)
from .bs_roots import (
    RootEntry,
    RootMultiset,
    classify_root,
    roots_irreducible_closed_form,
    topological_roots,
)
from .multiplier_jumping import antinef_closure, check_jumping_containment, jumping_numbers
from .zeta_poles import check_zeta_containment, pole_classification, topological_zeta

__version__ = "0.1.0"
