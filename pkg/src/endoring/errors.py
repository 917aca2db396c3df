"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: parse errors exit 2, mathematical
inconsistencies exit 3, oracle precondition violations exit 4.
"""


class EndoringError(Exception):
    pass


class ParseError(EndoringError):
    """Malformed or inconsistent input file."""


class StructuralError(EndoringError):
    """Operands from incompatible structures (e.g. different algebras)."""


class DegenerateLatticeError(EndoringError):
    """Generators do not span Q^4."""


class NotARingError(EndoringError):
    """A lattice failed multiplicative closure; carries the violating product."""

    def __init__(self, left, right, product):
        self.left = left
        self.right = right
        self.product = product
        super().__init__(
            f"lattice is not closed under multiplication: "
            f"({left}) * ({right}) = {product} lies outside"
        )


class MissingUnitError(EndoringError):
    """A candidate order does not contain 1."""


class MathematicalInconsistencyError(EndoringError):
    """An internal invariant guaranteed by the theory failed to hold."""


class OraclePreconditionError(EndoringError):
    """A divisibility query was issued for an element outside the oracle frame."""


class PrecisionError(EndoringError):
    """A p-adic computation was requested beyond the available precision."""
