"""Exception types shared across the toolkit."""


class VnfPlaceError(Exception):
    """Base class for all toolkit errors."""


class ParseError(VnfPlaceError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(VnfPlaceError):
    """An instance invariant is violated."""


class UnreachablePair(VnfPlaceError):
    def __init__(self, flow_id: str):
        self.flow_id = flow_id
        super().__init__(f"no path exists for flow {flow_id!r}")


class UnknownId(VnfPlaceError):
    """Lookup of a flow/node/function/resource id that does not exist."""


class InvalidRange(VnfPlaceError):
    """Bad parameters for synthetic demand generation."""


class NumericalFailure(VnfPlaceError):
    """The LP solver could not certify a result (pivot breakdown or
    post-solve feasibility check failed)."""


class InvalidRates(VnfPlaceError):
    """Rate vector outside [0, lambda] element-wise."""


class DegenerateInstance(VnfPlaceError):
    """Normalization is undefined (maximum demand is zero)."""


class ZTooSmall(VnfPlaceError):
    """Resource stretch too close to 1; primal-dual price exponents degenerate."""


class TooLarge(VnfPlaceError):
    """Instance exceeds the exhaustive-search guards."""
