"""Commutator calculus on finite groups and loops."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Kind,
    Subobject,
    congruence_generate,
    denormalize,
    direct_product,
    hom_check,
    hom_image_kernel,
    normal_closure,
    normal_subobjects,
    normalize,
    quotient,
    subobject_generate,
    validate_algebra,
)
from .catalog import builtin, load_algebra, resolve, save_algebra  # noqa: E402
from .commutators import (  # noqa: E402
    associator_subobject,
    cooperator_check,
    higgins_binary,
    huq_commutator,
    sh_check,
    smith_commutator,
    smith_normalization,
    ternary_group_exact,
    ternary_lower_bound,
    ternary_obstruction,
)
