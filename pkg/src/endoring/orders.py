"""Quaternion orders: lattices with verified ring structure.

Covers reduced discriminants, the codifferent and its ternary quadratic
form (Gorenstein test by primitivity), radicals mod q with their
idealizers (two-step Bass test), and q-maximal q-enlargement by the
radical-idealizer chain with an idempotent splitting step at the
hereditary stall.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import lcm

from . import linmod
from .errors import (
    MathematicalInconsistencyError,
    MissingUnitError,
    NotARingError,
    StructuralError,
)
from .lattice import Lattice4, integer_kernel
from .ntheory import exact_isqrt, valuation
from .quat import QuaternionAlgebra, QuatElement, det4, gram


@dataclass(frozen=True)
class Order:
    algebra: QuaternionAlgebra
    lattice: Lattice4

    def basis_elements(self) -> tuple[QuatElement, ...]:
        return tuple(QuatElement(self.algebra, b) for b in self.lattice.basis())

    def element(self, coords) -> QuatElement:
        return QuatElement(self.algebra, tuple(Fraction(x) for x in coords))

    def contains_element(self, x: QuatElement) -> bool:
        return self.lattice.contains(x.coeffs)

    def coords_of(self, x: QuatElement):
        return self.lattice.solve(x.coeffs)


def verify_order(lat: Lattice4, alg: QuaternionAlgebra) -> Order:
    """Check the ring axioms on a lattice and wrap it as an Order.

    Raises MissingUnitError when 1 is absent and NotARingError (naming the
    violating product) when multiplicative closure fails.
    """
    if not lat.contains((1, 0, 0, 0)):
        raise MissingUnitError("lattice does not contain 1")
    basis = [QuatElement(alg, b) for b in lat.basis()]
    for x in basis:
        for y in basis:
            prod = x * y
            if not lat.contains(prod.coeffs):
                raise NotARingError(x, y, prod)
    for x in basis:
        if x.trd().denominator != 1 or x.nrd().denominator != 1:
            raise MathematicalInconsistencyError(f"non-integral element {x} in a ring lattice")
    return Order(alg, lat)


def order_from_basis(alg: QuaternionAlgebra, vectors) -> Order:
    return verify_order(Lattice4.from_generators(vectors), alg)


def ring_closure(alg: QuaternionAlgebra, gens) -> Order:
    """Smallest order whose lattice contains the given elements and 1."""
    vecs = [(1, 0, 0, 0)] + [g.coeffs for g in gens]
    lat = Lattice4.from_generators(vecs)
    for _ in range(64):
        basis = [QuatElement(alg, b) for b in lat.basis()]
        prods = [(x * y).coeffs for x in basis for y in basis]
        grown = lat.add(Lattice4.from_generators(list(lat.basis()) + prods))
        if grown == lat:
            return Order(alg, lat)
        lat = grown
    raise MathematicalInconsistencyError("ring closure did not stabilize")


@cache
def discrd(order: Order) -> int:
    """Reduced discriminant: sqrt |det Trd(b_i b_j)|."""
    g = gram(order.basis_elements())
    d = abs(det4(g))
    if d.denominator != 1:
        raise MathematicalInconsistencyError("non-integral discriminant")
    return exact_isqrt(d.numerator)


def is_maximal(order: Order) -> bool:
    return discrd(order) == order.algebra.p


def standard_maximal_order(alg: QuaternionAlgebra) -> Order:
    """Maximal order Z<1, i, (1+j)/2, (i+ij)/2> for (a,b) = (-1,-p), p = 3 mod 4."""
    if alg.a != -1 or alg.b != -alg.p or alg.p % 4 != 3:
        raise StructuralError("standard maximal order needs the (-1,-p), p = 3 mod 4 presentation")
    h = Fraction(1, 2)
    o = order_from_basis(
        alg,
        [(1, 0, 0, 0), (0, 1, 0, 0), (h, 0, h, 0), (0, h, 0, h)],
    )
    if not is_maximal(o):
        raise MathematicalInconsistencyError("standard order is not maximal")
    return o


def codifferent(order: Order) -> Lattice4:
    """Dual of the order under the pairing (x, y) -> Trd(xy)."""
    g = gram(order.basis_elements())
    ginv = _inv4(g)
    basis = order.lattice.basis()
    cols = []
    for jcol in range(4):
        vec = [Fraction(0)] * 4
        for irow in range(4):
            c = ginv[irow][jcol]
            if c:
                vec = [v + c * b for v, b in zip(vec, basis[irow])]
        cols.append(tuple(vec))
    return Lattice4.from_generators(cols)


def _inv4(m):
    n = 4
    aug = [[Fraction(m[r][c]) for c in range(n)] + [Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        f = aug[col][col]
        aug[col] = [x / f for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                fr = aug[r][col]
                aug[r] = [x - fr * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def ternary_form_coefficients(order: Order):
    """Coefficients of the ternary quadratic form discrd(O) * nrd on the
    trace-zero part of the codifferent (the Gorenstein invariant)."""
    cod = codifferent(order)
    basis = [QuatElement(order.algebra, b) for b in cod.basis()]
    traces = [b.trd() for b in basis]
    den = 1
    for t in traces:
        den = lcm(den, t.denominator)
    tint = [int(t * den) for t in traces]
    if not any(tint):
        raise MathematicalInconsistencyError("trace functional vanishes on the codifferent")
    kernel = integer_kernel(tint)
    vs = []
    for kv in kernel:
        acc = order.algebra.element(0)
        for c, b in zip(kv, basis):
            if c:
                acc = acc + b.scale(c)
        vs.append(acc)
    d = discrd(order)
    coeffs = [d * v.nrd() for v in vs]
    for i in range(3):
        for j in range(i + 1, 3):
            coeffs.append(d * (vs[i] * vs[j].conj()).trd())
    return coeffs


def ternary_gorenstein_test(order: Order, q: int) -> bool:
    """True iff the ternary form attached to the order is primitive at q."""
    coeffs = [c for c in ternary_form_coefficients(order) if c != 0]
    vals = []
    for c in coeffs:
        v = valuation(c, q)
        if v < 0:
            raise MathematicalInconsistencyError("ternary form not q-integral")
        vals.append(v)
    return min(vals) == 0


def _mult_table(order: Order):
    """table[i][j] = integer coordinates of b_i * b_j over the order basis."""
    basis = order.basis_elements()
    table = []
    for x in basis:
        row = []
        for y in basis:
            coords = order.coords_of(x * y)
            row.append(tuple(int(c) for c in coords))
        table.append(row)
    return table


def _table_mul(table, x, y, q):
    out = [0, 0, 0, 0]
    for i in range(4):
        if x[i] % q == 0:
            continue
        for j in range(4):
            if y[j] % q == 0:
                continue
            f = x[i] * y[j]
            t = table[i][j]
            for k in range(4):
                out[k] = (out[k] + f * t[k]) % q
    return tuple(out)


def _radical_coords_brute(order: Order, q: int):
    # exhaustive: only used for q = 2 (16 elements)
    table = _mult_table(order)
    elems = [
        (a, b, c, d)
        for a in range(q)
        for b in range(q)
        for c in range(q)
        for d in range(q)
    ]

    def nilpotent(x):
        x2 = _table_mul(table, x, x, q)
        x4 = _table_mul(table, x2, x2, q)
        return all(v == 0 for v in x4)

    rad = [x for x in elems if all(nilpotent(_table_mul(table, x, a, q)) for a in elems)]
    basis = linmod.span_basis(rad, q)
    if len(rad) != q ** len(basis):
        raise MathematicalInconsistencyError("radical is not a subspace")
    return basis


def radical_coords_mod(order: Order, q: int):
    """Basis of rad(O/qO) in coordinates over the order basis.

    Odd q: kernel of the reduced-trace pairing, refined to the largest
    two-sided ideal it contains (for odd q the refinement is the identity;
    it is kept as a guard).  q = 2: exhaustive search over the 16 elements.
    """
    if q == 2:
        return _radical_coords_brute(order, q)
    basis = order.basis_elements()
    tmat = [[int((x * y).trd()) % q for y in basis] for x in basis]
    space = linmod.kernel(tmat, q)
    table = _mult_table(order)
    while space:
        red = linmod.span_basis(space, q)
        constraints = []
        for u in red:
            row_conditions = []
            for k in range(4):
                ek = tuple(1 if t == k else 0 for t in range(4))
                for prod in (_table_mul(table, u, ek, q), _table_mul(table, ek, u, q)):
                    row_conditions.append(prod)
            constraints.append(row_conditions)
        # x = sum y_m u_m must keep every listed product inside span(red)
        n_cond = len(constraints[0])
        rows = []
        for ci in range(n_cond):
            images = [constraints[m][ci] for m in range(len(red))]
            # condition: sum y_m images[m] in span(red): express via quotient
            for qrow in _quotient_rows(images, red, q):
                rows.append(qrow)
        if not rows or all(all(x == 0 for x in r) for r in rows):
            space = red
            break
        ys = linmod.kernel(rows, q)
        new_space = []
        for y in ys:
            vec = [0, 0, 0, 0]
            for c, u in zip(y, red):
                for t in range(4):
                    vec[t] = (vec[t] + c * u[t]) % q
            new_space.append(tuple(vec))
        new_space = linmod.span_basis(new_space, q)
        if len(new_space) == len(red):
            space = new_space
            break
        space = new_space
    rad = linmod.span_basis(space, q) if space else []
    _assert_nil(order, rad, q)
    return rad


def _quotient_rows(images, span, q):
    """Rows over y-coordinates expressing 'sum y_m images[m] in span'."""
    red, pivots = linmod.rref(list(span), q) if span else ([], [])
    residuals = []
    for w in images:
        v = [x % q for x in w]
        for r, pc in enumerate(pivots):
            if v[pc]:
                f = v[pc]
                v = [(a - f * b) % q for a, b in zip(v, red[r])]
        residuals.append(v)
    free_cols = [c for c in range(4) if c not in pivots]
    return [[residuals[m][c] for m in range(len(images))] for c in free_cols]


def _assert_nil(order: Order, rad, q: int):
    basis = order.basis_elements()

    def lift(u):
        acc = order.algebra.element(0)
        for c, b in zip(u, basis):
            if c:
                acc = acc + b.scale(c)
        return acc

    lifts = [lift(u) for u in rad]
    for x in lifts:
        if x.trd() != 0 and valuation(x.trd(), q) < 1:
            raise MathematicalInconsistencyError("radical element with unit trace")
        if x.nrd() != 0 and valuation(x.nrd(), q) < 1:
            raise MathematicalInconsistencyError("radical element with unit norm")
    for i, x in enumerate(lifts):
        for y in lifts[i + 1 :]:
            t = (x * y.conj()).trd()
            if t != 0 and valuation(t, q) < 1:
                raise MathematicalInconsistencyError("radical not totally isotropic")


def radical_lattice(order: Order, q: int) -> Lattice4:
    """Preimage in O of rad(O/qO), as a full lattice (contains qO)."""
    rad = radical_coords_mod(order, q)
    basis = order.lattice.basis()
    gens = [tuple(q * x for x in b) for b in basis]
    for u in rad:
        vec = [Fraction(0)] * 4
        for c, b in zip(u, basis):
            if c:
                vec = [v + c * x for v, x in zip(vec, b)]
        gens.append(tuple(vec))
    return Lattice4.from_generators(gens)


def _colon_lattice(J: Lattice4, alg: QuaternionAlgebra, side: str) -> Lattice4:
    """Left or right multiplier lattice {x : xJ in J} resp. {x : Jx in J}."""
    gens = [QuatElement(alg, b) for b in J.basis()]
    result = None
    for g in gens:
        ginv = g.inverse()
        if side == "left":
            imgs = [(QuatElement(alg, b) * ginv).coeffs for b in J.basis()]
        else:
            imgs = [(ginv * QuatElement(alg, b)).coeffs for b in J.basis()]
        lat = Lattice4.from_generators(imgs)
        result = lat if result is None else result.intersect(lat)
    return result


def radical_idealizer(order: Order, q: int) -> Order:
    """Two-sided multiplier order of the q-radical."""
    J = radical_lattice(order, q)
    left = _colon_lattice(J, order.algebra, "left")
    right = _colon_lattice(J, order.algebra, "right")
    return verify_order(left.intersect(right), order.algebra)


def is_bass_at(order: Order, q: int) -> bool:
    """Bass test at q: the order and its radical idealizer are Gorenstein."""
    if not ternary_gorenstein_test(order, q):
        return False
    return ternary_gorenstein_test(radical_idealizer(order, q), q)


def _split_idempotent(order: Order, q: int) -> QuatElement:
    """Element of O idempotent mod q, nontrivial in the split 2-dimensional
    semisimple quotient of O/qO.  Only called at the hereditary stall."""
    table = _mult_table(order)
    rad = radical_coords_mod(order, q)
    one = tuple(int(c) % q for c in order.coords_of(order.algebra.one()))
    span = list(rad) + [one]
    w = None
    for k in range(4):
        ek = tuple(1 if t == k else 0 for t in range(4))
        if not linmod.in_span(ek, span, q):
            w = ek
            break
    if w is None:
        raise MathematicalInconsistencyError("quotient of O/qO by its radical is 1-dimensional")
    w2 = _table_mul(table, w, w, q)
    # express w^2 = alpha*w + beta*1 modulo the radical
    sol = linmod.solve(
        [[w[t], one[t]] + [u[t] for u in rad] for t in range(4)],
        list(w2),
        q,
    )
    if sol is None:
        raise MathematicalInconsistencyError("semisimple quotient larger than expected")
    alpha, beta = sol[0], sol[1]
    cand = None
    for s in range(1, q):
        for t in range(q):
            if (s * s * alpha + 2 * s * t) % q == s and (s * s * beta + t * t) % q == t % q:
                cand = (s, t)
                break
        if cand:
            break
    if cand is None:
        raise MathematicalInconsistencyError("no split idempotent: residually inert quotient")
    s, t = cand
    e = tuple((s * w[k] + t * one[k]) % q for k in range(4))
    for _ in range(6):
        e2 = _table_mul(table, e, e, q)
        if e2 == e:
            break
        e3 = _table_mul(table, e2, e, q)
        e = tuple((3 * a - 2 * b) % q for a, b in zip(e2, e3))
    else:
        raise MathematicalInconsistencyError("idempotent lift did not converge")
    basis = order.basis_elements()
    acc = order.algebra.element(0)
    for c, b in zip(e, basis):
        if c:
            acc = acc + b.scale(c)
    return acc


def q_enlarge(order: Order, q: int) -> Order:
    """q-maximal q-enlargement.

    Greedily grows the order inside B by the left idealizer of its
    q-radical; at a hereditary stall with a split quotient, adjoins
    (1/q) * (1-e) J e (or the mirror) for a lifted idempotent e.  The
    result agrees with the input away from q and has v_q(discrd) equal
    to 0, or 1 when q = p.
    """
    alg = order.algebra
    target = 1 if q == alg.p else 0
    d0 = discrd(order)
    e0 = valuation(d0, q) if d0 % q == 0 else 0
    current = order
    for _ in range(2 * e0 + 8):
        d = discrd(current)
        v = valuation(d, q) if d % q == 0 else 0
        if v <= target:
            break
        J = radical_lattice(current, q)
        grown = _colon_lattice(J, alg, "left")
        if grown != current.lattice:
            current = verify_order(grown, alg)
            continue
        eidem = _split_idempotent(current, q)
        one = alg.one()
        jelems = [QuatElement(alg, b) for b in J.basis()]
        nxt = None
        for lft, rgt in ((one - eidem, eidem), (eidem, one - eidem)):
            gens = list(current.lattice.basis())
            gens += [(lft * g * rgt).scale(Fraction(1, q)).coeffs for g in jelems]
            try:
                cand = verify_order(Lattice4.from_generators(gens), alg)
            except (NotARingError, MissingUnitError):
                continue
            if valuation(discrd(cand), q) < v:
                nxt = cand
                break
        if nxt is None:
            raise MathematicalInconsistencyError(f"hereditary stall at q={q} could not be split")
        current = nxt
    else:
        raise MathematicalInconsistencyError("q-enlargement did not terminate")
    idx = order.lattice.index_in(current.lattice)
    if idx.denominator != 1:
        raise MathematicalInconsistencyError("enlargement is not a superorder")
    n = idx.numerator
    while n % q == 0:
        n //= q
    if n != 1:
        raise MathematicalInconsistencyError("enlargement index is not a q-power")
    return current
