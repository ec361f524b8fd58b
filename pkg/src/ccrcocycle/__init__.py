"""Finite-dimensional cocycle calculus for CCR flows, with a toy-Fock-space oracle."""
from .matcore import BlockPartition, Tolerance
from .generators import BlockGenerator, LocalProjectionPair
from .endo import NormalHom
from .focksim import DiscreteCocycle

__version__ = "0.1.0"

__all__ = ["BlockGenerator", "BlockPartition", "DiscreteCocycle", "LocalProjectionPair",
           "NormalHom", "Tolerance"]
