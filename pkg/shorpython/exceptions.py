class ShorpythonError(Exception):
    def __init__(self, error_message, status_code=None):
        self.status_code = status_code
        self.error_message = error_message

    def __str__(self):
        if self.status_code:
            return "(%s) %s" % (self.status_code, self.error_message)
        else:
            return self.error_message


class CircuitError(ShorpythonError):
    """Malformed gate or circuit, or an operation the circuit does not support."""


class BlockParameterError(ShorpythonError):
    """A circuit builder was given parameters outside its contract."""


class SimulatorError(ShorpythonError):
    """Capacity, width or numerical failure inside the statevector simulator."""


class OrderFindingError(ShorpythonError):
    """Invalid (N, a) pair handed to the order-finding driver."""


class FactoringError(ShorpythonError):
    def __init__(self, error_message, attempts=None, status_code=None):
        super().__init__(error_message, status_code)
        self.attempts = list(attempts or [])


class ResourceError(ShorpythonError):
    """Resource estimation requested outside the supported range."""
