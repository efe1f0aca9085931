class FraccutError(Exception):
    pass


class DimensionMismatch(FraccutError, ValueError):
    pass


class DegenerateSpan(FraccutError, ValueError):
    """Input points are affinely dependent."""


class NonGeneralPosition(FraccutError, ValueError):
    """Some d+1 points lie on a common hyperplane."""


class NotRepresentable(FraccutError, ValueError):
    """The requested fraction is not of the form 1/m."""


class NoRoot(FraccutError):
    pass


class NoConvergence(FraccutError):
    """A numerical solver exhausted its budget.

    ``best`` carries the best candidate seen, ``residual`` its residual and
    ``stage`` (when set) the recursion stage that failed.
    """

    def __init__(self, message, best=None, residual=None, stage=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.stage = stage


class DegenerateLimit(FraccutError):
    """Continuation reached a halfspace with every fraction below epsilon.

    ``diagnostic`` is ``(halfspace, fractions)``; the fractions are strictly
    ascending, which witnesses that the measures are not epsilon-not-permuted.
    """

    def __init__(self, message, diagnostic=None, steps=None):
        super().__init__(message)
        self.diagnostic = diagnostic
        self.steps = steps or []
