"""Exact computations on Pi-symmetric flag supermanifolds.

Super-polynomial arithmetic, chart atlases and transition maps, the
fundamental vector fields of q_n, and a brute-force solver for global
holomorphic functions and vector fields.
"""

__version__ = "0.1.0"

from .atlas import FlagType, build_chart, check_atlas, enumerate_charts, standard_index, transition
from .fields import ChartVectorField, GlobalField, Vertical, field_bracket, project, pushforward
from .grassmann import SuperPolynomial, SuperRational, VarTable
from .qn import QnElement, fundamental_field, mu_kernel, qn_basis, qn_bracket
from .solver import compare_with_qn, global_fields, global_functions, vertical_fields
from .supermatrix import SuperMatrix, inverse

__all__ = [
    "ChartVectorField",
    "FlagType",
    "GlobalField",
    "QnElement",
    "SuperMatrix",
    "SuperPolynomial",
    "SuperRational",
    "VarTable",
    "Vertical",
    "build_chart",
    "check_atlas",
    "compare_with_qn",
    "enumerate_charts",
    "field_bracket",
    "fundamental_field",
    "global_fields",
    "global_functions",
    "inverse",
    "mu_kernel",
    "project",
    "pushforward",
    "qn_basis",
    "qn_bracket",
    "standard_index",
    "transition",
    "vertical_fields",
]
