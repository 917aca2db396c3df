"""Local splitting machinery at a prime q split in the algebra.

Everything is computed with exact rationals whose denominators are
prime to q; congruences "mod q^(r+1)" are certified by exact valuation
checks rather than by truncated arithmetic.

The splitting map construction: a normalized local basis diagonalizes
(or block-diagonalizes, q = 2) the norm form; a zero divisor of the
form is Hensel-lifted to valuation >= r+1; conjugating a basis vector
by it yields a nilpotent; from the nilpotent a full system of 2x2
matrix units inside the order is assembled, which induces the linear
isomorphism onto M_2(Z/q^(r+1)).
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import MathematicalInconsistencyError, PrecisionError, StructuralError
from .ntheory import reduce_unit_mod, valuation
from .orders import Order
from .quat import QuatElement


@dataclass(frozen=True)
class Precision:
    q: int
    r: int

    def __post_init__(self):
        if self.r < 0:
            raise StructuralError("negative precision")

    @property
    def modulus(self) -> int:
        return self.q ** (self.r + 1)


def _pairing(x: QuatElement, y: QuatElement) -> Fraction:
    return (x * y.conj()).trd()


def _val(x, q):
    return None if x == 0 else valuation(x, q)


def _min_val(vals):
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def normalized_basis_at(order: Order, q: int):
    """Basis of O tensor Z_(q) on which the norm form is a sum of atomic
    forms: diagonal for odd q, diagonal and binary blocks for q = 2.

    Returns (basis, blocks) where blocks is a list of ("unit", a) entries
    for diagonal atoms a*x^2 and ("pair", (a, b, c)) entries for binary
    atoms a*x^2 + b*xy + c*y^2.
    """
    vecs = list(order.basis_elements())
    out = []
    blocks = []
    while vecs:
        n = len(vecs)
        diag = [_val(_pairing(v, v), q) for v in vecs]
        off = {}
        for i in range(n):
            for j in range(i + 1, n):
                off[(i, j)] = _val(_pairing(vecs[i], vecs[j]), q)
        dmin = _min_val(diag)
        omin = _min_val(off.values())
        if dmin is not None and (omin is None or dmin <= omin):
            i = diag.index(dmin)
            f = vecs.pop(i)
            bff = _pairing(f, f)
            vecs = [v - f.scale(_pairing(v, f) / bff) for v in vecs]
            out.append(f)
            blocks.append(("unit", f.nrd()))
            continue
        if q != 2:
            # odd q: mixing makes the minimum appear on the diagonal
            (i, j) = next(k for k, v in off.items() if v == omin)
            vecs[i] = vecs[i] + vecs[j]
            continue
        (i, j) = next(k for k, v in off.items() if v == omin)
        f1, f2 = vecs[i], vecs[j]
        vecs = [v for k, v in enumerate(vecs) if k not in (i, j)]
        b11, b12, b22 = _pairing(f1, f1), _pairing(f1, f2), _pairing(f2, f2)
        det = b11 * b22 - b12 * b12
        rest = []
        for v in vecs:
            c1, c2 = _pairing(v, f1), _pairing(v, f2)
            alpha = (c1 * b22 - c2 * b12) / det
            beta = (c2 * b11 - c1 * b12) / det
            rest.append(v - f1.scale(alpha) - f2.scale(beta))
        vecs = rest
        out.extend([f1, f2])
        blocks.append(("pair", (f1.nrd(), _pairing(f1, f2), f2.nrd())))
    for f in out:
        for c in order.coords_of(f):
            if c != 0 and valuation(c, q) < 0:
                raise MathematicalInconsistencyError("normalized basis left Z_(q)")
    return out, blocks


def _norm_coeff_matrix(blocks, q, modulus):
    """Integer-reduced coefficients of the norm form in the normalized basis,
    as (diag, cross) with cross[i] pairing slot i and i+1 inside a block."""
    diag, cross = [], []
    for kind, data in blocks:
        if kind == "unit":
            diag.append(reduce_unit_mod(data, modulus))
            cross.append(0)
        else:
            a, b, c = data
            diag.append(reduce_unit_mod(a, modulus))
            diag.append(reduce_unit_mod(c, modulus))
            cross.append(reduce_unit_mod(b, modulus))
            cross.append(0)
    return diag, cross


def zero_divisor_mod(order: Order, prec: Precision) -> QuatElement:
    """Element x of the q-maximal order (up to q-unit denominators) with
    v_q(nrd x) >= r+1 and some coordinate a q-unit."""
    q, modulus = prec.q, prec.modulus
    if q == order.algebra.p:
        raise StructuralError("the algebra is ramified at p; no zero divisors there")
    fs, blocks = normalized_basis_at(order, q)
    if q != 2:
        if any(kind != "unit" or valuation(a, q) != 0 for kind, a in blocks):
            raise MathematicalInconsistencyError("order is not q-maximal at odd q")
        a = [reduce_unit_mod(nf, modulus) for _, nf in blocks]
        sol = None
        for x1 in range(q):
            for x2 in range(q):
                for x3 in range(q):
                    if (x1, x2, x3) == (0, 0, 0):
                        continue
                    if (a[0] * x1 * x1 + a[1] * x2 * x2 + a[2] * x3 * x3) % q == 0:
                        sol = [x1, x2, x3]
                        break
                if sol:
                    break
            if sol:
                break
        if sol is None:
            raise MathematicalInconsistencyError("ternary conic without points mod q")
        piv = next(i for i in range(3) if sol[i] % q)
        for k in range(2, prec.r + 2):
            mk = q**k
            fval = sum(a[i] * sol[i] * sol[i] for i in range(3)) % mk
            if fval:
                deriv = (2 * a[piv] * sol[piv]) % q
                sol[piv] = (sol[piv] - fval * pow(deriv, -1, mk)) % mk
        x = order.algebra.element(0)
        for c, f in zip(sol, fs[:3]):
            x = x + f.scale(c)
    else:
        if [kind for kind, _ in blocks] != ["pair", "pair"]:
            raise MathematicalInconsistencyError("2-maximal order must split into two binary atoms")
        coeffs = []
        sol = []
        for _, (a, b, c) in blocks:
            if valuation(b, q) != 0:
                raise MathematicalInconsistencyError("binary atom with even cross term")
            va = valuation(a, 2)
            vc = valuation(c, 2)
            if va == 0 and vc >= 1:
                pair = (1, 0)
            elif va >= 1 and vc == 0:
                pair = (0, 1)
            else:
                pair = (1, 1)
            sol.extend(pair)
            coeffs.append((reduce_unit_mod(a, modulus), reduce_unit_mod(b, modulus), reduce_unit_mod(c, modulus)))

        def value(s, mk):
            total = 0
            for bi, (a, b, c) in enumerate(coeffs):
                x, y = s[2 * bi], s[2 * bi + 1]
                total += a * x * x + b * x * y + c * y * y
            return total % mk

        # pick the lift variable in the first block with odd derivative
        a0, b0, _ = coeffs[0]
        if sol[1] % 2:
            piv = 0
        else:
            piv = 1
        for k in range(2, prec.r + 2):
            mk = 2**k
            fval = value(sol, mk)
            if fval:
                x, y = sol[0], sol[1]
                deriv = (2 * a0 * x + b0 * y) if piv == 0 else (b0 * x + 2 * coeffs[0][2] * y)
                sol[piv] = (sol[piv] - fval * pow(deriv % mk, -1, mk)) % mk
        x = order.algebra.element(0)
        for c, f in zip(sol, fs):
            x = x + f.scale(c)
    n = x.nrd()
    if n != 0 and valuation(n, q) < prec.r + 1:
        raise MathematicalInconsistencyError("zero divisor lift failed the valuation check")
    coords = order.coords_of(x)
    if min(valuation(c, q) for c in coords if c != 0) != 0:
        raise MathematicalInconsistencyError("zero divisor vanished mod q")
    return x


def _integerize(order: Order, x: QuatElement, modulus: int) -> QuatElement:
    """Replace q-unit-denominator coordinates by integers mod modulus; the
    result lies in the order and is congruent to x."""
    coords = order.coords_of(x)
    out = order.algebra.element(0)
    for c, b in zip(coords, order.basis_elements()):
        ci = reduce_unit_mod(c, modulus)
        if ci:
            out = out + b.scale(ci)
    return out


def _coords_mod(order: Order, x: QuatElement, modulus: int):
    return tuple(reduce_unit_mod(c, modulus) for c in order.coords_of(x))


@dataclass(frozen=True)
class SplittingMap:
    """Isomorphism f: O tensor Z_q -> M_2(Z_q) mod q^(r+1), stored through
    the preimages of the four matrix units (elements of the order)."""

    order: Order
    precision: Precision
    units: tuple[QuatElement, QuatElement, QuatElement, QuatElement]  # E11 E12 E21 E22
    i_rep: QuatElement
    j_rep: QuatElement
    _minv: tuple  # inverse transfer matrix mod modulus, rows

    def apply(self, x: QuatElement):
        """Image of x as a 2x2 integer matrix with entries mod q^(r+1)."""
        modulus = self.precision.modulus
        c = _coords_mod(self.order, x, modulus)
        y = [sum(self._minv[r][k] * c[k] for k in range(4)) % modulus for r in range(4)]
        return ((y[0], y[1]), (y[2], y[3]))

    def matrix_of_one(self):
        return self.apply(self.order.algebra.one())


def _mat_mul_mod(x, y, modulus):
    return (
        (
            (x[0][0] * y[0][0] + x[0][1] * y[1][0]) % modulus,
            (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % modulus,
        ),
        (
            (x[1][0] * y[0][0] + x[1][1] * y[1][0]) % modulus,
            (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % modulus,
        ),
    )


def splitting_map(order: Order, prec: Precision) -> SplittingMap:
    """Compute the splitting isomorphism mod q^(r+1) for a q-maximal order."""
    q, modulus = prec.q, prec.modulus
    fs, _ = normalized_basis_at(order, q)
    x = zero_divisor_mod(order, prec)
    e = None
    for y in fs:
        cand = x.conj() * y * x
        coords = order.coords_of(cand)
        if any(c != 0 and valuation(c, q) == 0 for c in coords):
            e = cand
            break
    if e is None:
        raise MathematicalInconsistencyError("conjugation by the zero divisor vanished mod q")
    f = next(
        (fi for fi in fs if (e * fi).trd() != 0 and valuation((e * fi).trd(), q) == 0),
        None,
    )
    if f is None:
        raise MathematicalInconsistencyError("no basis vector pairs invertibly with the nilpotent")
    s = (e * f).trd()
    m = pow(reduce_unit_mod(s, modulus), -1, modulus)
    e11 = _integerize(order, (e * f).scale(m), modulus)
    e22 = order.algebra.one() - e11
    e21 = _integerize(order, (e22 * f * e11).scale(m), modulus)
    e12 = _integerize(order, e, modulus)
    units = (e11, e12, e21, e22)
    # transfer matrix: columns are coordinates of the unit preimages
    cols = [_coords_mod(order, u, modulus) for u in units]
    det = _det4_mod(cols, modulus)
    if det % q == 0:
        raise MathematicalInconsistencyError("matrix units do not span mod q")
    adj = _adj4_mod(cols, modulus)
    dinv = pow(det, -1, modulus)
    minv = tuple(tuple(adj[r][k] * dinv % modulus for k in range(4)) for r in range(4))
    if q != 2:
        i_rep = _integerize(order, e11 - e22, modulus)
        j_rep = _integerize(order, e12 + e21, modulus)
    else:
        i_rep = _integerize(order, e12 + e21 + e22, modulus)
        j_rep = _integerize(order, e12 + e21, modulus)
    sm = SplittingMap(order, prec, units, i_rep, j_rep, minv)
    _validate_splitting(sm)
    return sm


def _det4_mod(cols, modulus):
    # determinant of the 4x4 matrix with the given columns
    m = [[cols[c][r] for c in range(4)] for r in range(4)]

    def det3(a):
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )

    total = 0
    for c in range(4):
        sub = [[m[r][cc] for cc in range(4) if cc != c] for r in range(1, 4)]
        total += (-1) ** c * m[0][c] * det3(sub)
    return total % modulus


def _adj4_mod(cols, modulus):
    m = [[cols[c][r] for c in range(4)] for r in range(4)]

    def minor3(rs, cs):
        a = [[m[r][c] for c in cs] for r in rs]
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )

    idx = (0, 1, 2, 3)
    adj = [[0] * 4 for _ in range(4)]
    for i in idx:
        for j in idx:
            rs = tuple(r for r in idx if r != j)
            cs = tuple(c for c in idx if c != i)
            adj[i][j] = (-1) ** (i + j) * minor3(rs, cs) % modulus
    return adj


def _validate_splitting(sm: SplittingMap):
    modulus = sm.precision.modulus
    q = sm.precision.q
    basis = sm.order.basis_elements()
    imgs = [sm.apply(b) for b in basis]
    for bx, fx in zip(basis, imgs):
        for by, fy in zip(basis, imgs):
            if sm.apply(bx * by) != _mat_mul_mod(fx, fy, modulus):
                raise MathematicalInconsistencyError("splitting map is not multiplicative")
    if sm.apply(sm.j_rep) != ((0, 1), (1, 0)):
        raise MathematicalInconsistencyError("j' image is wrong")
    want_i = ((1, 0), (0, modulus - 1)) if q != 2 else ((0, 1), (1, 1))
    if sm.apply(sm.i_rep) != want_i:
        raise MathematicalInconsistencyError("i' image is wrong")


def lift_vertex_element(sm: SplittingMap, abc) -> QuatElement:
    """Element t of the order with f(t) = [[q^a, c], [0, q^b]] mod q^(r+1).

    Requires a + b <= r so that the congruence pins the vertex.
    """
    a, b, c = abc
    q, r = sm.precision.q, sm.precision.r
    modulus = sm.precision.modulus
    if a + b > r:
        raise PrecisionError(f"vertex depth {a + b} exceeds splitting precision {r}")
    one = sm.order.algebra.one()
    i_, j_ = sm.i_rep, sm.j_rep
    k_ = i_ * j_
    if q != 2:
        m2 = pow(2, -1, modulus)
        c0 = m2 * (q**a + q**b) % modulus
        c1 = m2 * (q**a - q**b) % modulus
        c2 = m2 * c % modulus
        c3 = c2
    else:
        c0 = (q**a + c) % modulus
        c1 = (q**b - q**a) % modulus
        c2 = (c - q**b + q**a) % modulus
        c3 = (-c) % modulus
    t = one.scale(c0) + i_.scale(c1) + j_.scale(c2) + k_.scale(c3)
    t = _integerize(sm.order, t, modulus)
    want = ((q**a % modulus, c % modulus), (0, q**b % modulus))
    if sm.apply(t) != want:
        raise MathematicalInconsistencyError("vertex lift does not match its matrix")
    return t
