"""JSON encoding of algebras, orders, problems, and results.

Rationals travel as "num/den" strings (plain "num" accepted and emitted
for integers) so nothing depends on float precision.  Ring structure is
always re-verified on load; multiplication tables are never trusted.
"""

import json
from fractions import Fraction

from .errors import EndoringError, ParseError
from .lattice import Lattice4
from .ntheory import factorize
from .orders import Order, discrd, verify_order
from .quat import QuaternionAlgebra


def frac_to_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def frac_from_str(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}") from None


def algebra_to_json(alg: QuaternionAlgebra) -> dict:
    return {"a": frac_to_str(alg.a), "b": frac_to_str(alg.b), "p": alg.p}


def algebra_from_json(data) -> QuaternionAlgebra:
    try:
        a, b, p = data["a"], data["b"], data["p"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"algebra object missing field: {exc}") from None
    if not isinstance(p, int):
        raise ParseError("characteristic p must be an integer")
    try:
        return QuaternionAlgebra.create(frac_from_str(a), frac_from_str(b), p)
    except EndoringError as exc:
        raise ParseError(f"invalid algebra: {exc}") from None


def lattice_to_json(lat: Lattice4) -> list:
    return [[frac_to_str(x) for x in col] for col in lat.basis()]


def lattice_from_json(data) -> Lattice4:
    if not isinstance(data, list) or len(data) < 4:
        raise ParseError("lattice needs at least four basis columns")
    cols = [[frac_from_str(x) for x in col] for col in data]
    if any(len(c) != 4 for c in cols):
        raise ParseError("basis vectors must have four coordinates")
    try:
        return Lattice4.from_generators(cols)
    except EndoringError as exc:
        raise ParseError(f"invalid lattice: {exc}") from None


def order_to_json(order: Order, label=None) -> dict:
    out = {"algebra": algebra_to_json(order.algebra), "basis": lattice_to_json(order.lattice)}
    if label:
        out["label"] = label
    return out


def order_from_json(data, alg=None) -> Order:
    if alg is None:
        alg = algebra_from_json(data.get("algebra", {}))
    lat = lattice_from_json(data.get("basis"))
    try:
        return verify_order(lat, alg)
    except EndoringError as exc:
        raise ParseError(f"basis does not span an order: {exc}") from None


def problem_from_json(data):
    """Parse and validate a problem file.

    Returns (order, factorization, oracle_order, options).
    """
    if not isinstance(data, dict):
        raise ParseError("problem file must be a JSON object")
    alg = algebra_from_json(data.get("algebra", {}))
    order = order_from_json(data.get("order", {}), alg)
    fact_raw = data.get("discriminant_factorization")
    if not isinstance(fact_raw, list) or not fact_raw:
        raise ParseError("missing discriminant_factorization")
    fact = []
    for pair in fact_raw:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) for x in pair)):
            raise ParseError(f"bad factorization entry {pair!r}")
        fact.append((pair[0], pair[1]))
    prod = 1
    for q, e in fact:
        if e < 1:
            raise ParseError("factorization exponents must be positive")
        prod *= q**e
    d = discrd(order)
    if prod != d:
        raise ParseError(f"factorization multiplies to {prod}, but discrd(order) = {d}")
    if dict(fact) != factorize(d):
        raise ParseError("factorization entries are not the prime factorization")
    oracle_spec = data.get("oracle")
    hidden = None
    if oracle_spec is not None:
        if oracle_spec.get("kind") != "hidden-order":
            raise ParseError(f"unknown oracle kind {oracle_spec.get('kind')!r}")
        hidden = order_from_json(oracle_spec.get("order", {}), alg)
    options = data.get("options", {}) or {}
    if not isinstance(options, dict):
        raise ParseError("options must be an object")
    return order, fact, hidden, options


def load_problem(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    return problem_from_json(data)


def result_to_json(end: Order, sols, total_calls, deterministic=True) -> dict:
    out = {
        "endomorphism_ring": order_to_json(end, label="End(E)"),
        "local_solutions": [
            {
                "q": s.q,
                "e": s.e,
                "bass": s.bass,
                "r": s.r,
                "path": [("inf" if step == s.q else step) for step in s.gamma.steps],
                "oracle_calls": s.oracle_calls,
                "order": order_to_json(s.order),
                "enlargement": order_to_json(s.enlargement),
            }
            for s in sols
        ],
        "total_oracle_calls": total_calls,
    }
    if not deterministic:
        import datetime

        out["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return out
