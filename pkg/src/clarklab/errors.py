"""Exception types.  Everything raised on bad input derives from ClarkError."""


class ClarkError(ValueError):
    pass


class ReturnTimeError(ClarkError):
    """No admissible return time; carries the best deviation seen."""

    def __init__(self, message, best_deviation, best_n):
        super().__init__(f"{message} (best deviation {best_deviation:.3e} at n={best_n})")
        self.best_deviation = best_deviation
        self.best_n = best_n


class HypothesisError(ClarkError):
    """A construction's precondition failed; ``check`` names it."""

    def __init__(self, check, residual=None, detail=""):
        msg = check
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.check = check
        self.residual = residual
