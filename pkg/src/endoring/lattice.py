"""Exact full-rank Z-lattices in Q^4 with a unique canonical representation.

A lattice is stored as (1/den) * Z-span of four integer columns held in
lower-triangular column Hermite Normal Form with positive pivots and
off-pivot entries reduced into [0, pivot).  The pair (den, columns) is
content-reduced, so two Lattice4 values compare equal exactly when the
lattices are equal.

Sums are computed by concatenating generators, duals via the inverse
transpose of the basis matrix, and intersections through the duality
dual(L1 cap L2) = dual(L1) + dual(L2).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import DegenerateLatticeError
from .ntheory import valuation

Vec4 = tuple[Fraction, Fraction, Fraction, Fraction]


def _hnf_columns(cols):
    """Lower-triangular column HNF of integer 4-row columns.

    Raises DegenerateLatticeError when the columns do not span Q^4.
    """
    work = [list(c) for c in cols if any(c)]
    fixed = 0
    for row in range(4):
        while True:
            nz = [j for j in range(fixed, len(work)) if work[j][row]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(work[j][row]))
            a, b = nz[0], nz[1]
            f = work[b][row] // work[a][row]
            for t in range(4):
                work[b][t] -= f * work[a][t]
        nz = [j for j in range(fixed, len(work)) if work[j][row]]
        if not nz:
            raise DegenerateLatticeError("generators do not span Q^4")
        j = nz[0]
        work[fixed], work[j] = work[j], work[fixed]
        if work[fixed][row] < 0:
            work[fixed] = [-x for x in work[fixed]]
        fixed += 1
    h = work[:4]
    for row in range(1, 4):
        p = h[row][row]
        for j in range(row):
            f = h[j][row] // p
            if f:
                for t in range(row, 4):
                    h[j][t] -= f * h[row][t]
    return h


def _adjugate(cols):
    """Adjugate of a 4x4 integer matrix given by columns; returns columns."""

    def minor3(rs, cs):
        (r0, r1, r2), (c0, c1, c2) = rs, cs
        m = [[cols[c][r] for c in (c0, c1, c2)] for r in (r0, r1, r2)]
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    idx = (0, 1, 2, 3)
    adj = [[0] * 4 for _ in range(4)]
    for i in idx:
        for j in idx:
            rs = tuple(r for r in idx if r != j)
            cs = tuple(c for c in idx if c != i)
            adj[j][i] = (-1) ** (i + j) * minor3(rs, cs)
    # adj is adjugate with adj[col][row] layout matching `cols`
    return [tuple(col) for col in adj]


@dataclass(frozen=True)
class Lattice4:
    den: int
    cols: tuple[tuple[int, int, int, int], ...]

    @staticmethod
    def from_integer_columns(cols, den=1):
        if den == 0:
            raise DegenerateLatticeError("zero denominator")
        if den < 0:
            den, cols = -den, [tuple(-x for x in c) for c in cols]
        h = _hnf_columns(cols)
        g = abs(den)
        for c in h:
            for x in c:
                g = gcd(g, x)
        return Lattice4(den // g, tuple(tuple(x // g for x in c) for c in h))

    @staticmethod
    def from_generators(gens):
        """Canonical lattice spanned by rational 4-vectors (>= 4 of them)."""
        gens = [tuple(Fraction(x) for x in g) for g in gens]
        den = 1
        for g in gens:
            for x in g:
                den = lcm(den, x.denominator)
        cols = [tuple(int(x * den) for x in g) for g in gens]
        return Lattice4.from_integer_columns(cols, den)

    @staticmethod
    def standard():
        return Lattice4.from_integer_columns([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])

    def basis(self) -> tuple[Vec4, ...]:
        d = self.den
        return tuple(tuple(Fraction(x, d) for x in c) for c in self.cols)

    def det(self) -> Fraction:
        p = 1
        for i in range(4):
            p *= self.cols[i][i]
        return Fraction(p, self.den**4)

    def scale(self, s) -> "Lattice4":
        s = Fraction(s)
        if s == 0:
            raise DegenerateLatticeError("scaling by zero")
        cols = [tuple(x * abs(s.numerator) for x in c) for c in self.cols]
        return Lattice4.from_integer_columns(cols, self.den * s.denominator)

    def add(self, other: "Lattice4") -> "Lattice4":
        d = lcm(self.den, other.den)
        f1, f2 = d // self.den, d // other.den
        cols = [tuple(x * f1 for x in c) for c in self.cols]
        cols += [tuple(x * f2 for x in c) for c in other.cols]
        return Lattice4.from_integer_columns(cols, d)

    def dual(self) -> "Lattice4":
        # basis matrix B = M/den; dual basis = (B^T)^{-1} = den * adj(M^T)/det(M)
        mt = tuple(tuple(self.cols[r][c] for r in range(4)) for c in range(4))
        adj = _adjugate(mt)
        detm = 1
        for i in range(4):
            detm *= self.cols[i][i]
        cols = [tuple(x * self.den for x in c) for c in adj]
        return Lattice4.from_integer_columns(cols, detm)

    def intersect(self, other: "Lattice4") -> "Lattice4":
        return self.dual().add(other.dual()).dual()

    def solve(self, vec) -> Vec4:
        """Coordinates of vec over the basis (exact, always solvable)."""
        v = [Fraction(x) for x in vec]
        x = [Fraction(0)] * 4
        for i in range(4):
            acc = v[i] * self.den
            for j in range(i):
                acc -= self.cols[j][i] * x[j]
            x[i] = Fraction(acc, self.cols[i][i])
        return tuple(x)

    def contains(self, vec) -> bool:
        return all(c.denominator == 1 for c in self.solve(vec))

    def contains_lattice(self, other: "Lattice4") -> bool:
        return all(self.contains(b) for b in other.basis())

    def contains_at(self, vec, q: int) -> bool:
        """Membership in self tensor Z_(q) (denominators prime to q allowed)."""
        return all(c == 0 or valuation(c, q) >= 0 for c in self.solve(vec))

    def contains_lattice_at(self, other: "Lattice4", q: int) -> bool:
        return all(self.contains_at(b, q) for b in other.basis())

    def equals_at(self, other: "Lattice4", q: int) -> bool:
        return self.contains_lattice_at(other, q) and other.contains_lattice_at(self, q)

    def index_in(self, sup: "Lattice4") -> Fraction:
        """Generalized index [sup : self] = |det(self)/det(sup)|."""
        return abs(self.det() / sup.det())


def integer_kernel(t):
    """Basis (3 integer 4-vectors) of {x in Z^4 : t . x = 0} for integer t != 0."""
    t = list(t)
    if not any(t):
        raise ValueError("zero functional")
    # column operations on identity tracked alongside t
    u = [[1 if i == j else 0 for i in range(4)] for j in range(4)]  # u[j] = column j
    while True:
        nz = [j for j in range(4) if t[j]]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda j: abs(t[j]))
        a, b = nz[0], nz[1]
        f = t[b] // t[a]
        t[b] -= f * t[a]
        u[b] = [x - f * y for x, y in zip(u[b], u[a])]
    pivot = next(j for j in range(4) if t[j])
    return [tuple(u[j]) for j in range(4) if j != pivot]
