class PlanscapeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PlanscapeError, ValueError):
    pass


class ArgumentError(PlanscapeError, ValueError):
    pass


class FormatError(PlanscapeError, ValueError):
    pass


class ParseError(PlanscapeError, ValueError):
    pass


class DegenerateError(PlanscapeError, ValueError):
    """A statistic is undefined because some quantity has zero variance."""


class IncompletenessError(PlanscapeError, ValueError):
    def __init__(self, environment_id, size, measured_count, missing_plans):
        self.environment_id = environment_id
        self.size = size
        self.measured_count = measured_count
        self.missing_plans = list(missing_plans)
        shown = "; ".join(",".join(p) for p in self.missing_plans)
        super().__init__(
            f"environment {environment_id!r}: {size - measured_count} of {size} plans missing "
            f"(first {len(self.missing_plans)}: {shown})"
        )
