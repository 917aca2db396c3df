import random
from fractions import Fraction as F

import pytest

import paperdata
from endoring.errors import PrecisionError
from endoring.ntheory import reduce_unit_mod, valuation
from endoring.orders import q_enlarge, standard_maximal_order
from endoring.padic import (
    Precision,
    _mat_mul_mod,
    lift_vertex_element,
    normalized_basis_at,
    splitting_map,
    zero_divisor_mod,
)
from endoring.quat import QuaternionAlgebra


@pytest.fixture(scope="module")
def alg():
    return paperdata.algebra()


@pytest.fixture(scope="module")
def omax(alg):
    return paperdata.maximal_order(alg)


def test_normalized_basis_standard_order_at_7(alg):
    from endoring.orders import order_from_basis

    std = order_from_basis(alg, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    fs, blocks = normalized_basis_at(std, 7)
    assert [k for k, _ in blocks] == ["unit"] * 4
    diag = sorted(abs(a) for _, a in blocks)
    assert diag == [1, 1, 103, 103]
    # pairwise orthogonality of the output
    for i in range(4):
        for j in range(i + 1, 4):
            assert (fs[i] * fs[j].conj()).trd() == 0


def test_normalized_basis_at_2(omax):
    fs, blocks = normalized_basis_at(omax, 2)
    kinds = [k for k, _ in blocks]
    assert kinds == ["pair", "pair"]
    for _, (_, b, _) in blocks:
        assert valuation(b, 2) == 0


def test_normalized_basis_spans_same_local_order(omax):
    from endoring.lattice import Lattice4

    fs, _ = normalized_basis_at(omax, 5)
    lat = Lattice4.from_generators([f.coeffs for f in fs])
    assert lat.equals_at(omax.lattice, 5)


def test_zero_divisor_small_case(alg):
    # 3 + j has nrd 112 = 16*7
    x = alg.element(3, 0, 1, 0)
    assert x.nrd() == 112
    assert valuation(x.nrd(), 7) == 1


@pytest.mark.parametrize("q", [2, 3, 5, 7, 13])
@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
def test_zero_divisor_valuations(omax, q, r):
    x = zero_divisor_mod(omax, Precision(q, r))
    assert valuation(x.nrd(), q) >= r + 1
    coords = omax.coords_of(x)
    assert min(valuation(c, q) for c in coords if c != 0) == 0


@pytest.mark.parametrize("q", [2, 3, 5, 7, 13])
@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
def test_splitting_map_soundness(omax, q, r):
    prec = Precision(q, r)
    sm = splitting_map(omax, prec)
    modulus = prec.modulus
    # multiplicativity is asserted at construction; spot-check det vs nrd
    rng = random.Random(100 * q + r)
    basis = omax.basis_elements()
    for _ in range(20):
        x = omax.algebra.element(0)
        for b in basis:
            x = x + b.scale(rng.randrange(-6, 7))
        fx = sm.apply(x)
        det = (fx[0][0] * fx[1][1] - fx[0][1] * fx[1][0]) % modulus
        assert det == reduce_unit_mod(x.nrd(), modulus) % modulus
    assert sm.apply(sm.j_rep) == ((0, 1), (1, 0))
    want_i = ((1, 0), (0, modulus - 1)) if q != 2 else ((0, 1), (1, 1))
    assert sm.apply(sm.i_rep) == want_i
    # i', j' are genuinely in the order
    assert omax.contains_element(sm.i_rep)
    assert omax.contains_element(sm.j_rep)


def test_paper_explicit_splitting_at_7(alg, omax):
    """The displayed map 1,i,j,ij -> I, [[0,-1],[1,0]], [[0,a],[a,0]],
    [[-a,0],[0,a]] with a^2 = -103 mod 49 is multiplicative on O."""
    q, r = 7, 1
    modulus = q ** (r + 1)
    a = 17  # hensel lift of 3 mod 7: 17^2 = 289 = 44 = -103 mod 49
    assert (a * a + 103) % modulus == 0
    imgs = {
        0: ((1, 0), (0, 1)),
        1: ((0, -1 % modulus), (1, 0)),
        2: ((0, a), (a, 0)),
        3: ((-a % modulus, 0), (0, a)),
    }

    def phi(x):
        out = [[0, 0], [0, 0]]
        for idx in range(4):
            c = reduce_unit_mod(x.coeffs[idx], modulus)
            for rr in range(2):
                for cc in range(2):
                    out[rr][cc] = (out[rr][cc] + c * imgs[idx][rr][cc]) % modulus
        return ((out[0][0], out[0][1]), (out[1][0], out[1][1]))

    basis = omax.basis_elements()
    for x in basis:
        for y in basis:
            assert phi(x * y) == _mat_mul_mod(phi(x), phi(y), modulus)
    for x in basis:
        det = phi(x)
        d = (det[0][0] * det[1][1] - det[0][1] * det[1][0]) % modulus
        assert d == reduce_unit_mod(x.nrd(), modulus)


@pytest.mark.parametrize("q", [3, 7, 13, 2])
def test_lift_vertex_generators_roundtrip(omax, q):
    r = 2
    prec = Precision(q, r)
    sm = splitting_map(omax, prec)
    modulus = prec.modulus
    # identity
    t = lift_vertex_element(sm, (0, 0, 0))
    assert sm.apply(t) == ((1, 0), (0, 1))
    # all generators: gamma_c = (0,1,c), gamma_inf = (1,0,0)
    for c in range(q):
        t = lift_vertex_element(sm, (0, 1, c))
        assert sm.apply(t) == ((1, c), (0, q))
        assert omax.contains_element(t)
    t = lift_vertex_element(sm, (1, 0, 0))
    assert sm.apply(t) == ((q % modulus, 0), (0, 1))
    # depth-2 vertex
    t = lift_vertex_element(sm, (1, 1, 1))
    assert sm.apply(t) == ((q, 1), (0, q))
    with pytest.raises(PrecisionError):
        lift_vertex_element(sm, (2, 1, 0))


def test_splitting_on_enlarged_orders():
    alg = paperdata.algebra()
    o0 = paperdata.o0(alg)
    for q in (7, 13):
        oq = q_enlarge(o0, q)
        sm = splitting_map(oq, Precision(q, 3))
        assert sm.apply(sm.order.algebra.one()) == ((1, 0), (0, 1))


def test_splitting_other_primes():
    for p in (179, 1019):
        alg = QuaternionAlgebra.for_prime(p)
        omax = standard_maximal_order(alg)
        for q in (2, 3, 5):
            sm = splitting_map(omax, Precision(q, 2))
            assert sm.apply(alg.one()) == ((1, 0), (0, 1))
