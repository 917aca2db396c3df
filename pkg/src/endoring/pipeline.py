"""Top-level algorithms: local distance, path recovery, Bass binary search,
local-to-global order construction, and the full endomorphism-ring
computation driven by a division oracle.

Also houses the integer-matrix-model realization of tree vertices
(orders T^{-1} M_2(Z) T inside M_2(Q)) used to cross-validate the tree
combinatorics against exact lattice arithmetic.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .btt import (
    MatrixPath,
    TreeVertex,
    allowed_next_steps,
    dot_graph,
    path_from_root,
    step_name,
    vertex_of_path,
)
from .divide import CountingOracle, DivisionOracle
from .errors import MathematicalInconsistencyError
from .lattice import Lattice4
from .ntheory import valuation
from .orders import Order, discrd, is_bass_at, q_enlarge, verify_order
from .padic import Precision, SplittingMap, lift_vertex_element, splitting_map
from .quat import QuatElement


# ---------------------------------------------------------------------------
# trace log


class TraceLog:
    """Collects oracle queries, tree steps, and explored subtrees."""

    def __init__(self):
        self.events = []
        self.explored = {}

    def oracle_event(self, q, stage, beta, n, answer, count):
        self.events.append(
            {
                "type": "oracle",
                "q": q,
                "stage": stage,
                "beta": [str(c) for c in beta.coeffs],
                "n": str(n),
                "answer": bool(answer),
                "count": count,
            }
        )

    def step_event(self, q, level, step, accepted):
        self.events.append(
            {
                "type": "step",
                "q": q,
                "k": level,
                "candidate": step_name(q, step),
                "accepted": bool(accepted),
            }
        )

    def saw_vertex(self, q, vertex):
        self.explored.setdefault(q, set()).add(vertex)

    def dot_sources(self):
        return {q: dot_graph(vs, title=f"explored_q{q}") for q, vs in self.explored.items()}


# ---------------------------------------------------------------------------
# local solutions


@dataclass
class LocalSolution:
    q: int
    e: int
    bass: bool
    enlargement: Order
    r: int
    gamma: MatrixPath
    order: Order  # global order whose q-part is End(E) tensor Z_q
    oracle_calls: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# distance (countdown loop)


def distance_to_end(o0: Order, oq: Order, q: int, e: int, oracle: DivisionOracle) -> int:
    """Least r with q^r O_q inside End(E); at most 4e oracle calls."""
    basis = oq.basis_elements()
    for i in range(e - 1, -1, -1):
        for b in basis:
            if o0.lattice.contains(b.coeffs):
                continue
            if not oracle.is_divisible(b.scale(q ** (i + 1)), q):
                return i + 1
    return 0


# ---------------------------------------------------------------------------
# conjugation and the local patch


def conjugate_order_lattice(oq: Order, t: QuatElement, q: int, k: int) -> Lattice4:
    """(1/q^k) * conj(t) O_q t."""
    tc = t.conj()
    gens = [(tc * b * t).scale(Fraction(1, q**k)).coeffs for b in oq.basis_elements()]
    return Lattice4.from_generators(gens)


def local_patch(x: Lattice4, y: Lattice4, q: int) -> Lattice4:
    """The lattice equal to x at q and to y at every other prime."""

    def need(a: Lattice4, b: Lattice4) -> int:
        # least m >= 0 with q^m * a inside b at q
        worst = 0
        for col in a.basis():
            for c in b.solve(col):
                if c != 0:
                    worst = max(worst, -min(0, valuation(c, q)))
        return worst

    m = max(need(y, x), need(x, y))
    patched = x.intersect(y.scale(Fraction(1, q**m))).add(y.scale(q**m))
    if not patched.equals_at(x, q):
        raise MathematicalInconsistencyError("local patch lost the q-part")
    return patched


def global_order_from_vertices(o0: Order, oq: Order, sm: SplittingMap, vertices, r: int) -> Order:
    """Global order whose q-part realizes the intersection of the given
    tree vertices (1 to 3 of them) and whose other localizations agree
    with the starting order."""
    q = sm.precision.q
    if not 1 <= len(vertices) <= 3:
        raise MathematicalInconsistencyError("vertex count out of range")
    lats = []
    for v in vertices:
        if v.depth == 0:
            lats.append(oq.lattice)
            continue
        t = lift_vertex_element(sm, (v.a, v.b, v.c))
        lats.append(conjugate_order_lattice(oq, t, q, v.depth))
    x = lats[0]
    for other in lats[1:]:
        x = x.intersect(other)
    return verify_order(local_patch(x, o0.lattice, q), o0.algebra)


# ---------------------------------------------------------------------------
# path recovery


def generator_lifts(sm: SplittingMap):
    """Lift of every generator in Sigma: step c -> element over gamma_c."""
    q = sm.precision.q
    lifts = {c: lift_vertex_element(sm, (0, 1, c)) for c in range(q)}
    lifts[q] = lift_vertex_element(sm, (1, 0, 0))
    return lifts


def find_path_to_end(
    o0: Order,
    oq: Order,
    q: int,
    r: int,
    sm: SplittingMap,
    lifts,
    oracle: DivisionOracle,
    log: TraceLog | None = None,
):
    """Recover the matrix path of length r from the enlargement's vertex to
    the local endomorphism ring; at most 4(rq+1) oracle calls.

    Returns (path, t) where t lifts the associated matrix.
    """
    basis = oq.basis_elements()
    word: list[int] = []
    t_cur = oq.algebra.one()
    prev = None
    for level in range(1, r + 1):
        accepted = None
        for step in allowed_next_steps(q, prev):
            t_cand = lifts[step] * t_cur
            if log is not None:
                log.saw_vertex(q, vertex_of_path(MatrixPath(q, tuple(word + [step]))))
            ok = True
            for b in basis:
                el = (t_cand.conj() * b * t_cand).scale(Fraction(q) ** (r - 2 * level))
                if o0.lattice.contains(el.coeffs):
                    continue
                if not oracle.is_divisible(el.scale(q**3), q**3):
                    ok = False
                    break
            if log is not None:
                log.step_event(q, level, step, ok)
            if ok:
                accepted = step
                t_cur = t_cand
                break
        if accepted is None:
            raise MathematicalInconsistencyError(
                f"no candidate accepted at level {level} for q={q}: oracle and order disagree"
            )
        word.append(accepted)
        prev = accepted
    return MatrixPath(q, tuple(word)), t_cur


# ---------------------------------------------------------------------------
# Bass branch


def enumerate_bass_path(o0: Order, sm: SplittingMap, e: int):
    """Vertices of the path of maximal orders containing the image of O_0,
    walked outward from the root while containment persists."""
    q = sm.precision.q
    modulus = sm.precision.modulus
    imgs = [sm.apply(b) for b in o0.basis_elements()]

    def contains_image(word):
        path = MatrixPath(q, tuple(word))
        from .btt import associated_matrix

        t = associated_matrix(path)
        k = len(word)
        adj = ((t[1][1], -t[0][1]), (-t[1][0], t[0][0]))
        mod = q**k
        for y in imgs:
            prod = _mat_mul(_mat_mul(t, y), adj)
            if any(x % mod for row in prod for x in row):
                return False
        return True

    def walk(first_step):
        out = []
        word = [first_step]
        if not contains_image(word):
            return out
        out.append(tuple(word))
        for _ in range(e):
            extended = None
            for s in allowed_next_steps(q, word[-1]):
                if contains_image(word + [s]):
                    if extended is not None:
                        raise MathematicalInconsistencyError("containment set branches: not Bass")
                    extended = s
            if extended is None:
                break
            word.append(extended)
            out.append(tuple(word))
        return out

    directions = []
    for s in allowed_next_steps(q, None):
        if contains_image([s]):
            directions.append(s)
    if len(directions) > 2:
        raise MathematicalInconsistencyError("more than two stable neighbors: not Bass")
    words: list[tuple] = []
    if directions:
        left = walk(directions[0])
        words.extend(reversed(left))
    words.append(())
    if len(directions) == 2:
        words.extend(walk(directions[1]))
    if len(words) > e + 1:
        raise MathematicalInconsistencyError("containment path longer than e+1")
    return [vertex_of_path(MatrixPath(q, w)) for w in words]


def _mat_mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def bass_search(
    o0: Order,
    oq: Order,
    sm: SplittingMap,
    q: int,
    e: int,
    oracle: DivisionOracle,
    log: TraceLog | None = None,
):
    """Binary search along the containment path; at most
    4*ceil(log2(e+1)) oracle calls.  Returns (vertex, path list)."""
    path_list = enumerate_bass_path(o0, sm, e)
    if log is not None:
        for v in path_list:
            log.saw_vertex(q, v)
    lst = list(path_list)
    while len(lst) > 1:
        m = len(lst) // 2
        test = global_order_from_vertices(o0, oq, sm, [lst[0], lst[m - 1]], e)
        depth = max(lst[0].depth, lst[m - 1].depth)
        n = q ** (depth + 3 * e)
        ok = True
        for b in test.basis_elements():
            if o0.lattice.contains(b.coeffs):
                continue
            if not oracle.is_divisible(b.scale(n), n):
                ok = False
                break
        lst = lst[:m] if ok else lst[m:]
    return lst[0], path_list


# ---------------------------------------------------------------------------
# master routine


def compute_endomorphism_ring(
    o0: Order,
    factorization,
    oracle: DivisionOracle,
    log: TraceLog | None = None,
    parallel: bool = False,
):
    """Run the per-prime local pipeline and assemble End(E).

    factorization: iterable of (prime, exponent) pairs multiplying to
    discrd(O_0).  Returns (end_order, local solutions, total calls).
    """
    p = o0.algebra.p
    delta = discrd(o0)
    prod = 1
    for q, e in factorization:
        prod *= q**e
    if prod != delta:
        raise MathematicalInconsistencyError(
            f"stated factorization multiplies to {prod}, discriminant is {delta}"
        )
    if delta == p:
        return o0, [], 0

    items = sorted(factorization)

    def solve_one(q, e):
        if q == p:
            op = q_enlarge(o0, p)
            return LocalSolution(
                q=p,
                e=e,
                bass=True,
                enlargement=op,
                r=0,
                gamma=MatrixPath(q, ()),
                order=op,
                oracle_calls={},
            )
        bass = is_bass_at(o0, q)
        oq = q_enlarge(o0, q)
        calls = {}
        if bass:
            sm = splitting_map(oq, Precision(q, e))
            bass_oracle = CountingOracle(oracle, log, stage="bass", q=q)
            vertex, path_list = bass_search(o0, oq, sm, q, e, bass_oracle, log)
            budget = 4 * math.ceil(math.log2(e + 1)) if e > 0 else 0
            if bass_oracle.calls > budget:
                raise MathematicalInconsistencyError(
                    f"bass search used {bass_oracle.calls} > {budget} oracle calls"
                )
            calls["bass"] = bass_oracle.calls
            r = vertex.depth
            gamma = path_from_root(vertex)
            o_tilde = global_order_from_vertices(o0, oq, sm, [vertex], e)
        else:
            dist_oracle = CountingOracle(oracle, log, stage="distance", q=q)
            r = distance_to_end(o0, oq, q, e, dist_oracle)
            if dist_oracle.calls > 4 * e:
                raise MathematicalInconsistencyError(
                    f"distance used {dist_oracle.calls} > {4 * e} oracle calls"
                )
            calls["distance"] = dist_oracle.calls
            if r > e:
                raise MathematicalInconsistencyError("distance exceeds the discriminant valuation")
            if r == 0:
                gamma = MatrixPath(q, ())
                o_tilde = oq
            else:
                sm = splitting_map(oq, Precision(q, r))
                lifts = generator_lifts(sm)
                path_oracle = CountingOracle(oracle, log, stage="path", q=q)
                gamma, t_total = find_path_to_end(o0, oq, q, r, sm, lifts, path_oracle, log)
                if path_oracle.calls > 4 * (r * q + 1):
                    raise MathematicalInconsistencyError(
                        f"path search used {path_oracle.calls} > {4 * (r * q + 1)} oracle calls"
                    )
                calls["path"] = path_oracle.calls
                conj = conjugate_order_lattice(oq, t_total, q, r)
                o_tilde = verify_order(local_patch(conj, o0.lattice, q), o0.algebra)
        d = discrd(o_tilde)
        if d % q == 0:
            raise MathematicalInconsistencyError(f"local solution at {q} is not q-maximal")
        return LocalSolution(
            q=q, e=e, bass=bass, enlargement=oq, r=r, gamma=gamma, order=o_tilde, oracle_calls=calls
        )

    if parallel and len(items) > 1:
        import threading

        lock = threading.Lock()
        inner = oracle

        class LockedOracle(DivisionOracle):
            @property
            def calls(self):
                return inner.calls

            def is_divisible(self, beta, n):
                with lock:
                    return inner.is_divisible(beta, n)

        oracle = LockedOracle()
        import concurrent.futures

        with concurrent.futures.ThreadPoolExecutor(max_workers=len(items)) as ex:
            sols = list(ex.map(lambda qe: solve_one(*qe), items))
    else:
        sols = [solve_one(q, e) for q, e in items]

    total = o0.lattice
    for sol in sols:
        total = total.add(sol.order.lattice)
    end = verify_order(total, o0.algebra)
    if discrd(end) != p:
        raise MathematicalInconsistencyError(
            f"assembled order has reduced discriminant {discrd(end)}, expected {p}"
        )
    if not end.lattice.contains_lattice(o0.lattice):
        raise MathematicalInconsistencyError("assembled order lost the input order")
    total_calls = sum(sum(s.oracle_calls.values()) for s in sols)
    return end, sols, total_calls


# ---------------------------------------------------------------------------
# integer-matrix realization of tree vertices (verification support)

E_UNITS = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))  # E11 E12 E21 E22


def mat_coords_mul(x, y):
    """Product in M_2 on (x11, x12, x21, x22) coordinate vectors."""
    return (
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    )


def mat_coords_trace(x):
    return x[0] + x[3]


def vertex_order_lattice(v: TreeVertex) -> Lattice4:
    """The order T^{-1} M_2(Z) T as a lattice in E-coordinates."""
    t = v.matrix()
    adj = ((t[1][1], -t[0][1]), (-t[1][0], t[0][0]))
    den = Fraction(1, v.q**v.depth)
    gens = []
    for e in E_UNITS:
        em = ((e[0], e[1]), (e[2], e[3]))
        prod = _mat_mul(_mat_mul(adj, em), t)
        gens.append(
            (
                den * prod[0][0],
                den * prod[0][1],
                den * prod[1][0],
                den * prod[1][1],
            )
        )
    return Lattice4.from_generators(gens)


def intersection_lattice(vertices) -> Lattice4:
    lat = None
    for v in vertices:
        vl = vertex_order_lattice(v)
        lat = vl if lat is None else lat.intersect(vl)
    if lat is None:
        raise MathematicalInconsistencyError("empty vertex set")
    return lat


def mat_lattice_discrd_val(lat: Lattice4, q: int) -> int:
    """v_q of the reduced discriminant of a lattice order in M_2(Q)."""
    from .quat import det4

    basis = lat.basis()
    g = [[mat_coords_trace(mat_coords_mul(x, y)) for y in basis] for x in basis]
    d = abs(det4(g))
    if d.denominator != 1:
        raise MathematicalInconsistencyError("non-integral matrix gram determinant")
    from .ntheory import exact_isqrt

    return valuation(exact_isqrt(d.numerator), q)


def vertex_contains_mat_lattice(v: TreeVertex, lat: Lattice4) -> bool:
    """Whether the order of the vertex contains the lattice (locally at q)."""
    t = v.matrix()
    adj = ((t[1][1], -t[0][1]), (-t[1][0], t[0][0]))
    for b in lat.basis():
        bm = ((b[0], b[1]), (b[2], b[3]))
        prod = _mat_mul(_mat_mul(t, bm), adj)
        for row in prod:
            for x in row:
                if x != 0 and valuation(x, v.q) < v.depth:
                    return False
    return True


def scalar_plus_power_lattice(v: TreeVertex, r: int) -> Lattice4:
    """Z + q^r * (order of the vertex), in E-coordinates."""
    base = vertex_order_lattice(v)
    gens = [(1, 0, 0, 1)] + [tuple(v.q**r * x for x in b) for b in base.basis()]
    return Lattice4.from_generators(gens)
