"""Exception types raised across the pipeline."""


class RobustDomainError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RobustDomainError, ValueError):
    pass


class ConfigurationError(RobustDomainError, ValueError):
    pass


class EmptyTableError(RobustDomainError):
    """No record carried communication data, so no ratio table can be built."""


class SchemaError(RobustDomainError):
    """A persisted file is truncated, malformed, or has an unsupported version."""


class DegenerateTrainingError(RobustDomainError):
    """Training data has a single class or too few rows."""


class DivergenceError(RobustDomainError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch
        self.loss = loss


class UndefinedMetricError(RobustDomainError, ValueError):
    pass
