"""Decision machinery for the intuitionistic modal logic IK4.

Thin Python surface over the C++ core: formula parsing and rendering,
birelational model evaluation under four satisfiability variants, bounded
countermodel search, the clip-saturation procedure with its truth-lemma
check, an intuitionistic propositional validity test, and a Hilbert proof
checker.
"""

from ik4._core import (
    FileFormatError,
    Formula,
    FormulaSyntaxError,
    InvariantError,
    Model,
    SaturationSummary,
    SearchResult,
    atoms,
    check_condition,
    check_proof,
    closure_members,
    countermodel_search,
    forces,
    freeze_modal,
    heredity_violations,
    ipl_valid,
    length,
    nicify_tree,
    nlt_bound,
    parse,
    render,
    saturate,
    strictify_tree,
    tree_equivalent,
    true_in_model,
    valid_in_frame,
)

__all__ = [
    "FileFormatError",
    "Formula",
    "FormulaSyntaxError",
    "InvariantError",
    "Model",
    "SaturationSummary",
    "SearchResult",
    "atoms",
    "check_condition",
    "check_proof",
    "closure_members",
    "countermodel_search",
    "forces",
    "freeze_modal",
    "heredity_violations",
    "ipl_valid",
    "length",
    "nicify_tree",
    "nlt_bound",
    "parse",
    "render",
    "saturate",
    "strictify_tree",
    "tree_equivalent",
    "true_in_model",
    "valid_in_frame",
]
