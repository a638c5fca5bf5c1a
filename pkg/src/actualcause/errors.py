"""Exception types shared across the package."""


class ActualCauseError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(ActualCauseError):
    """A model, context, or intervention violates a structural constraint."""


class FormulaError(ActualCauseError):
    """A formula refers to unknown variables or out-of-range values."""


class NormalityError(ActualCauseError):
    """A typicality spec or normality relation is ill-formed or inconsistent."""


class SearchBudgetExceeded(ActualCauseError):
    """A witness search would enumerate more candidates than the configured cap."""

    def __init__(self, candidates: int, budget: int):
        super().__init__(
            f"witness search needs {candidates} candidate settings, "
            f"budget allows {budget}"
        )
        self.candidates = candidates
        self.budget = budget


class OracleCapExceeded(ActualCauseError):
    """The brute-force oracle only handles very small models."""
