"""The Bruhat-Tits tree for GL_2(Q_q): vertices, matrix paths, distances.

Vertices are standard coset representatives (a, b, c) for the maximal
order T^{-1} M_2(Z_q) T with T = [[q^a, c], [0, q^b]].  Paths are words
in the generator set Sigma = {gamma_0, ..., gamma_{q-1}, gamma_inf};
step q in a word encodes gamma_inf.  The module is purely integer
combinatorics; order-lattice realizations live in the pipeline.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import MathematicalInconsistencyError, StructuralError
from .ntheory import is_prime, reduce_unit_mod, valuation


@dataclass(frozen=True)
class TreeVertex:
    q: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise StructuralError(f"{self.q} is not prime")
        if self.a < 0 or self.b < 0 or not 0 <= self.c < self.q**self.b:
            raise StructuralError("vertex labels out of range")
        if self.a > 0 and self.b > 0 and self.c % self.q == 0 and self.c != 0:
            raise StructuralError("standard representative needs v_q(c) = 0")
        if self.a > 0 and self.b > 0 and self.c == 0:
            raise StructuralError("scalar matrix is not a standard representative")

    @property
    def depth(self) -> int:
        return self.a + self.b

    def matrix(self):
        return ((self.q**self.a, self.c), (0, self.q**self.b))

    def sort_key(self):
        return (self.depth, self.a, self.b, self.c)


def root(q: int) -> TreeVertex:
    return TreeVertex(q, 0, 0, 0)


def gen_matrix(q: int, step: int):
    """Generator matrix: step c < q is [[1,c],[0,q]]; step q is [[q,0],[0,1]]."""
    if step == q:
        return ((q, 0), (0, 1))
    if 0 <= step < q:
        return ((1, step), (0, q))
    raise StructuralError(f"step {step} out of range for q={q}")


def step_name(q: int, step: int) -> str:
    return "inf" if step == q else str(step)


def allowed_next_steps(q: int, prev) -> list[int]:
    """Nonbacktracking continuations after the previous step (None at the root)."""
    if prev is None:
        return list(range(q + 1))
    if prev == q:
        return list(range(1, q + 1))
    return list(range(q))


@dataclass(frozen=True)
class MatrixPath:
    q: int
    steps: tuple[int, ...]

    def __post_init__(self):
        prev = None
        for s in self.steps:
            if s not in allowed_next_steps(self.q, prev):
                raise StructuralError(
                    f"backtracking or invalid step {step_name(self.q, s)} after "
                    f"{'start' if prev is None else step_name(self.q, prev)}"
                )
            prev = s

    def __len__(self):
        return len(self.steps)

    def extended(self, step: int) -> "MatrixPath":
        return MatrixPath(self.q, self.steps + (step,))


def associated_matrix(path: MatrixPath):
    """Product c_n ... c_1 of the generator matrices, later steps on the left."""
    t = ((1, 0), (0, 1))
    for s in path.steps:
        g = gen_matrix(path.q, s)
        t = _mul(g, t)
    return t


def _mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def canonical_vertex(q: int, mat) -> TreeVertex:
    """Standard representative of the homothety/left-GL_2(Z_q) class of a
    nonsingular matrix with rational entries."""
    m = [[Fraction(x) for x in row] for row in mat]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det == 0:
        raise StructuralError("singular matrix does not label a vertex")
    # triangularize by left multiplication over Z_(q)
    if m[1][0] != 0:
        v00 = valuation(m[0][0], q) if m[0][0] != 0 else None
        v10 = valuation(m[1][0], q)
        if v00 is None or v10 < v00:
            m[0], m[1] = m[1], m[0]
        f = m[1][0] / m[0][0]
        m[1] = [x - f * y for x, y in zip(m[1], m[0])]
    # unit-normalize the diagonal
    a = valuation(m[0][0], q)
    u = m[0][0] / q**a
    m[0] = [x / u for x in m[0]]
    b = valuation(m[1][1], q)
    w = m[1][1] / q**b
    m[1] = [x / w for x in m[1]]
    c = m[0][1]
    while True:
        # reduce c into Z mod q^b, then strip common q-powers (homothety)
        c = Fraction(reduce_unit_mod(c, q**b)) if b > 0 else Fraction(0)
        shift = min(a, b, valuation(c, q) if c != 0 else a + b)
        if shift == 0:
            break
        a, b, c = a - shift, b - shift, c / q**shift
    return TreeVertex(q, a, b, int(c))


def vertex_of_path(path: MatrixPath) -> TreeVertex:
    v = canonical_vertex(path.q, associated_matrix(path))
    if v.depth != len(path):
        raise MathematicalInconsistencyError("nonbacktracking path with cancellation")
    return v


@lru_cache(maxsize=1 << 16)
def path_from_root(v: TreeVertex) -> MatrixPath:
    """The unique nonbacktracking word from the root to the vertex."""
    q = v.q
    t = [list(row) for row in v.matrix()]
    steps = []
    for _ in range(v.depth):
        r0 = (t[0][0] % q, t[0][1] % q)
        row = r0 if any(r0) else (t[1][0] % q, t[1][1] % q)
        if not any(row):
            raise MathematicalInconsistencyError("matrix content at q while peeling path")
        if row[0] % q:
            step = row[1] * pow(row[0], -1, q) % q
        else:
            step = q
        g = gen_matrix(q, step)
        adj = ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))
        t2 = _mul(t, adj)
        if any(x % q for r in t2 for x in r):
            raise MathematicalInconsistencyError("path step does not divide")
        t = [[x // q for x in r] for r in t2]
        steps.append(step)
    return MatrixPath(q, tuple(steps))


def distance(v1: TreeVertex, v2: TreeVertex) -> int:
    if v1.q != v2.q:
        raise StructuralError("vertices in different trees")
    if v1 == v2:
        return 0
    s1, s2 = path_from_root(v1).steps, path_from_root(v2).steps
    k = 0
    for x, y in zip(s1, s2):
        if x != y:
            break
        k += 1
    return (len(s1) - k) + (len(s2) - k)


def d3(vertices) -> int:
    """max over ordered triples (repetition allowed) of the pairwise distance sum."""
    vs = sorted(set(vertices), key=TreeVertex.sort_key)
    if not vs:
        raise StructuralError("d3 of an empty set")
    pair = {}
    for i, x in enumerate(vs):
        for j, y in enumerate(vs):
            pair[(i, j)] = pair.get((j, i), None)
            if pair[(i, j)] is None:
                pair[(i, j)] = distance(x, y)
    best = 0
    n = len(vs)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = pair[(i, j)] + pair[(j, k)] + pair[(k, i)]
                if s > best:
                    best = s
    return best


def tu_triple(vertices):
    """A triple attaining d3; its intersection equals the full intersection."""
    vs = sorted(set(vertices), key=TreeVertex.sort_key)
    if not vs:
        raise StructuralError("empty vertex set")
    best, arg = -1, None
    n = len(vs)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = (
                    distance(vs[i], vs[j])
                    + distance(vs[j], vs[k])
                    + distance(vs[k], vs[i])
                )
                if s > best:
                    best, arg = s, (vs[i], vs[j], vs[k])
    return arg


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    """The q+1 adjacent vertices: children in generator order, then the parent."""
    path = path_from_root(v)
    prev = path.steps[-1] if path.steps else None
    out = [vertex_of_path(path.extended(s)) for s in allowed_next_steps(v.q, prev)]
    if path.steps:
        out.append(vertex_of_path(MatrixPath(v.q, path.steps[:-1])))
    return out


def ball(center: TreeVertex, radius: int):
    """All vertices within the given distance of center (BFS order)."""
    seen = {center}
    frontier = [center]
    yield center
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    yield w
        frontier = nxt


def standard_vertices_up_to(q: int, radius: int):
    """All vertices at distance <= radius from the root, by their labels.

    Closed-form enumeration: (a, b, c) with a + b <= radius, 0 <= c < q^b,
    and v_q(c) = 0 whenever both a and b are positive."""
    for depth in range(radius + 1):
        for a in range(depth + 1):
            b = depth - a
            if a and b:
                for c in range(1, q**b):
                    if c % q:
                        yield TreeVertex(q, a, b, c)
            elif b:
                for c in range(q**b):
                    yield TreeVertex(q, a, b, c)
            else:
                yield TreeVertex(q, a, 0, 0)


def _validate_path_of_vertices(pverts):
    if not pverts:
        raise StructuralError("empty path")
    for x, y in zip(pverts, pverts[1:]):
        if distance(x, y) != 1:
            raise StructuralError("vertex sequence is not a path")
    if len(set(pverts)) != len(pverts):
        raise StructuralError("vertex sequence repeats a vertex")
    if len(pverts) > 1 and distance(pverts[0], pverts[-1]) != len(pverts) - 1:
        raise StructuralError("vertex sequence backtracks")


def ball_triple(pverts, ell: int):
    """Three vertices whose intersection realizes the ell-neighborhood of the
    path: arms of length ell grown off both endpoints and off the first
    vertex, mutually disjoint, smallest generator first."""
    pverts = list(pverts)
    _validate_path_of_vertices(pverts)
    q = pverts[0].q
    if ell == 0:
        triple = (pverts[0], pverts[-1], pverts[0])
    else:
        used = set(pverts)

        def grow(anchor):
            cur = anchor
            for _ in range(ell):
                # deterministic: children by generator index, then the parent
                cand = [w for w in neighbors(cur) if w not in used]
                if not cand:
                    raise MathematicalInconsistencyError("no free direction for an arm")
                cur = cand[0]
                used.add(cur)
            return cur

        lam1 = grow(pverts[0])
        lam2 = grow(pverts[-1])
        lam3 = grow(pverts[0])
        triple = (lam1, lam2, lam3)
    want = 6 * ell + 2 * (len(pverts) - 1)
    if d3(triple) != want:
        raise MathematicalInconsistencyError(f"arm construction reached d3 {d3(triple)} != {want}")
    return triple


def neighborhood_of_path(pverts, ell: int):
    """The set N_ell(P) of vertices within distance ell of the path."""
    out = set()
    for v in pverts:
        out.update(ball(v, ell))
    return out


def dot_graph(vertices, title="btt") -> str:
    """Graphviz source for the induced subgraph on the given vertices."""
    vs = sorted(set(vertices), key=TreeVertex.sort_key)
    names = {v: f"v{k}" for k, v in enumerate(vs)}
    lines = [f"graph {title} {{", "  node [shape=circle fontsize=10];"]
    for v in vs:
        lines.append(f'  {names[v]} [label="({v.a},{v.b},{v.c})"];')
    for i, v in enumerate(vs):
        for w in vs[i + 1 :]:
            if distance(v, w) == 1:
                lines.append(f"  {names[v]} -- {names[w]};")
    lines.append("}")
    return "\n".join(lines)
