"""Additive information functionals on projection lattices.

Evaluate ``I(P) = I_s(rho(P_i)) + sum tr(mu P_i) log2 rho(P_i)``, recover
``mu`` and ``I_s`` from a black-box additive oracle, build Boolean structures
and the chains connecting them, dilate projections, and run axiom checks.
"""

__version__ = "0.1.0"

from . import exceptions
from .exceptions import AddinfoError, OracleNotAdditive, OracleProtocolError, SchemaError
from .borel import IntervalSet, MeasurablePartition, lebesgue
from .linalg import (
    Projection,
    ProjectionPartition,
    SignedOperator,
    State,
    coordinate_partition,
    make_state,
    physically_independent,
    product_partition,
    projection_partition,
)
from .structure import BooleanStructure, connect_chain, spectral_structure, uniform_structure
from .functionals import (
    Distribution,
    GeneralInformation,
    LinearCombination,
    Renyi,
    Shannon,
    StepCDF,
    Zero,
    conditional_info,
    renyi,
    renyi_functional,
    shannon,
    von_neumann_info,
)
from .oracle import InformationOracle, SubprocessOracle, from_information
from .decompose import decompose, verify_decomposition
from .dilation import check_bound, dilate, dilation_audit
from .gallery import check_khinchin, check_renyi_suite

__all__ = [
    "exceptions", "AddinfoError", "OracleNotAdditive", "OracleProtocolError", "SchemaError",
    "IntervalSet", "MeasurablePartition", "lebesgue",
    "Projection", "ProjectionPartition", "SignedOperator", "State", "coordinate_partition",
    "make_state", "physically_independent", "product_partition", "projection_partition",
    "BooleanStructure", "connect_chain", "spectral_structure", "uniform_structure",
    "Distribution", "GeneralInformation", "LinearCombination", "Renyi", "Shannon", "StepCDF",
    "Zero", "conditional_info", "renyi", "renyi_functional", "shannon", "von_neumann_info",
    "InformationOracle", "SubprocessOracle", "from_information",
    "InformationDecomposer", "decompose", "verify_decomposition",
    "check_bound", "dilate", "dilation_audit", "check_khinchin", "check_renyi_suite",
]


def __getattr__(name):
    # scikit-learn is slow to import; load the estimator on first use
    if name == "InformationDecomposer":
        from .estimator import InformationDecomposer
        return InformationDecomposer
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
