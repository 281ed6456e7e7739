"""Exception hierarchy shared by all modules."""


class GgmError(Exception):
    """Base class for every error raised by this package."""


class SizeError(GgmError, ValueError):
    """Chain length or vector dimension outside the supported range."""


class ParityError(GgmError, ValueError):
    """Operation needs an even number of sites."""


class HermiticityError(GgmError, ArithmeticError):
    """An expectation value picked up an imaginary part it should not have."""


class ContractViolation(GgmError, ValueError):
    """Input breaks a documented precondition (e.g. unnormalized state)."""


class ConvergenceError(GgmError, RuntimeError):
    """Iterative eigensolver ran out of Krylov dimension."""

    def __init__(self, message, best_residual, iterations):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations


class DegenerateGroundStateError(GgmError, RuntimeError):
    """GGM was requested on a ground state that is not unique."""


class PropagationError(GgmError, RuntimeError):
    """Time evolution exhausted its substep budget."""

    def __init__(self, message, time_reached):
        super().__init__(message)
        self.time_reached = time_reached
