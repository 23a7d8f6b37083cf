"""Exact computations with treelike integer forms and their boundary linking forms."""

from .boundary import ContractError, ExtendedQuadraticForm, boundary_of_matrix, boundary_presentation, extended
from .exact_linalg import IntMatrix, RatMatrix, SingularMatrixError, det, invert_rational, signature, smith_normal_form
from .gauss import IntegrityError, gauss_milgram
from .linking import (
    FiniteAbelianGroup,
    KContext,
    QuadraticLinkingForm,
    Undecided,
    are_isomorphic,
    catalog_cyclic,
    catalog_hyperbolic,
    catalog_pseudo_hyperbolic,
    direct_sum,
)
from .realize import (
    Presentation,
    cyclic_tree,
    decompose_small,
    even_euclid,
    hyperbolic_tree,
    non_treelike_certificate,
    present,
    present_form,
    pseudo_hyperbolic_tree,
    stabilize_treelike,
    theta_adjust,
)
from .skew_decomp import SkewDecomposition, decompose_skew_tree
from .tree_forms import LabelledTree, PlumbingGraph, SkewLabelledTree, connect_sum_graphs, glue_summands, tree_det, tree_to_form

__all__ = [
    "ContractError",
    "ExtendedQuadraticForm",
    "FiniteAbelianGroup",
    "IntMatrix",
    "IntegrityError",
    "KContext",
    "LabelledTree",
    "PlumbingGraph",
    "Presentation",
    "QuadraticLinkingForm",
    "RatMatrix",
    "SingularMatrixError",
    "SkewDecomposition",
    "SkewLabelledTree",
    "Undecided",
    "are_isomorphic",
    "boundary_of_matrix",
    "boundary_presentation",
    "catalog_cyclic",
    "catalog_hyperbolic",
    "catalog_pseudo_hyperbolic",
    "connect_sum_graphs",
    "cyclic_tree",
    "decompose_skew_tree",
    "decompose_small",
    "det",
    "direct_sum",
    "even_euclid",
    "extended",
    "gauss_milgram",
    "glue_summands",
    "hyperbolic_tree",
    "invert_rational",
    "non_treelike_certificate",
    "present",
    "present_form",
    "pseudo_hyperbolic_tree",
    "signature",
    "smith_normal_form",
    "stabilize_treelike",
    "theta_adjust",
    "tree_det",
    "tree_to_form",
]
