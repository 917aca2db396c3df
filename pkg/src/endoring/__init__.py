"""Exact local-global reconstruction of supersingular endomorphism rings
from a finite-index quaternion suborder, over the Bruhat-Tits tree, with
a pluggable divisibility oracle."""

from .divide import DivisionOracle, HiddenOrderOracle
from .orders import Order, discrd, is_bass_at, q_enlarge, verify_order
from .pipeline import compute_endomorphism_ring
from .quat import QuaternionAlgebra, QuatElement

__all__ = [
    "DivisionOracle",
    "HiddenOrderOracle",
    "Order",
    "QuatElement",
    "QuaternionAlgebra",
    "compute_endomorphism_ring",
    "discrd",
    "is_bass_at",
    "q_enlarge",
    "verify_order",
]

__version__ = "0.1.0"
