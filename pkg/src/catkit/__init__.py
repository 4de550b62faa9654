"""Equivariant singularity theory for sign-group actions, with mean-field applications."""

__version__ = "0.1.0"

from .classify import ClassificationResult, classify_germ  # noqa: E402
from .groups import SignAction, reynolds_project  # noqa: E402
from .jets import Jet  # noqa: E402
from .local_algebra import codimension, determinacy_order, span_test, tangent_span  # noqa: E402
from .unfolding import Unfolding, is_transversal, universal_unfolding  # noqa: E402

__all__ = [
    "ClassificationResult", "Jet", "SignAction", "Unfolding", "classify_germ", "codimension",
    "determinacy_order", "is_transversal", "reynolds_project", "span_test", "tangent_span",
    "universal_unfolding",
]
