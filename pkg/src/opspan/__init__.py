"""Exact calculus for operads of cospans and spans over rooted trees."""

from .adjoint import (
    AdjointFamily,
    ConfigVerdict,
    adjoint_family,
    build_adjoint_corolla,
    check_lax_cocycle,
    coadjoint_build,
    config_type_check,
    config_type_wrt_check,
    segal_alpha_bijective,
    transition_alpha,
)
from .cospans import (
    Cospan,
    Span,
    compose_cospans,
    compose_spans,
    cospans_equivalent,
    dualize,
    spans_equivalent,
    unit_cospan,
    unit_span,
)
from .finset import FinMap, FinSet, SliceObj, pullback, pushout, slice_exponential
from .omega import (
    GenStep,
    OmegaMor,
    all_morphisms,
    compose_morphisms,
    decompose,
    identity_mor,
    inner_face,
    make_generator,
    validate_morphism,
)
from .opcat import (
    OpCategory,
    as_discrete_opcat,
    check_rectified_coherence,
    rectify_generator,
    rectify_tree,
    validate_opcat,
)
from .operads import (
    SetOperad,
    act_on_generator,
    act_on_morphism,
    builtin_operad,
    eval_on_tree,
    validate_operad,
)
from .trees import (
    CanonicalTree,
    Tree,
    automorphisms,
    canonicalize,
    corolla,
    enumerate_trees,
    eta,
    parse_tree,
    segal_core,
    star,
)

__all__ = [name for name in dir() if not name.startswith("_")]
