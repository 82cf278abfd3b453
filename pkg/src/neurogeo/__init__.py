"""Exact algebraic geometry of polynomial neural networks.

Networks with polynomial activations are polynomial maps from weights to
coefficient vectors. This package expands them exactly, computes Jacobian
ranks, detects singular subnetworks, counts dimensions of critical-target
sets, and studies fibers of the parametrization.
"""
from .kernels import BACKEND
from .netparam import (
    AmbientBasis,
    CnnSpec,
    CnnWeights,
    MlpSpec,
    MlpWeights,
    SubnetCnnSpec,
    SubnetMlpSpec,
    embed,
    load_config,
    load_weights,
)
from .polyalg import Activation, MultiPoly, PolyMap

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "AmbientBasis",
    "BACKEND",
    "CnnSpec",
    "CnnWeights",
    "MlpSpec",
    "MlpWeights",
    "MultiPoly",
    "PolyMap",
    "SubnetCnnSpec",
    "SubnetMlpSpec",
    "embed",
    "load_config",
    "load_weights",
]
