"""Worked-example data for p = 103 used across the test suite.

All rational coordinate vectors are over the basis 1, i, j, ij of the
quaternion algebra (-1, -103 | Q).
"""

from fractions import Fraction as F

from endoring.orders import order_from_basis
from endoring.quat import QuaternionAlgebra

P = 103
DELTA = 7**5 * 13**3 * 103


def algebra():
    return QuaternionAlgebra.for_prime(103)


def o0_vectors():
    # last vector carries its large coefficient on j, not ij: with ij the
    # four vectors do not span a ring; with j the span is exactly O7 cap O13
    return [
        (1, 0, 0, 0),
        (-11095, F(-21, 2), -11095, F(-7, 2)),
        (-49, F(-49, 2), -49, F(-49, 2)),
        (F(107653, 2), 0, F(107653, 2), 0),
    ]


def o0(alg=None):
    alg = alg or algebra()
    return order_from_basis(alg, o0_vectors())


def maximal_order(alg=None):
    alg = alg or algebra()
    return order_from_basis(
        alg,
        [
            (1, 0, 0, 0),
            (0, -1, 0, 0),
            (0, F(-1, 2), 0, F(-1, 2)),
            (F(1, 2), 0, F(1, 2), 0),
        ],
    )


def o7(alg=None):
    alg = alg or algebra()
    return order_from_basis(
        alg,
        [
            (1, 0, 0, 0),
            (0, F(-1, 2), -1, F(-1, 2)),
            (0, -41, -1, 2),
            (F(-1, 2), F(-119, 2), F(9, 2), F(-15, 2)),
        ],
    )


def o13(alg=None):
    alg = alg or algebra()
    return order_from_basis(
        alg,
        [
            (1, 0, 0, 0),
            (0, -49, 0, 0),
            (F(-1, 2), F(-21, 2), F(7, 2), F(-7, 2)),
            (F(-1, 2), -7, F(21, 2), 14),
        ],
    )


def candidate7_vectors():
    """Basis of the accepted neighbor order at q = 7 (conjugate of O7)."""
    return [
        (1, 0, 0, 0),
        (0, F(1051811, 14), -69985, F(-1961725, 14)),
        (0, F(39997171, 7), 285869, F(-986434, 7)),
        (F(-140113, 2), F(118328575, 14), F(-2085159, 2), F(8810583, 14)),
    ]


def endomorphism_ring(alg=None):
    alg = alg or algebra()
    return order_from_basis(
        alg,
        [
            (1, 0, 0, 0),
            (0, F(-17, 14), 0, F(-1, 14)),
            (0, F(15, 7), 0, F(-2, 7)),
            (F(-1, 2), 0, F(-1, 2), 0),
        ],
    )
