"""
Custom Exceptions
"""


class ApplicationError(Exception):
    """Base application error"""
    pass


class ArgumentError(ApplicationError, ValueError):
    """Invalid argument (unknown layer, k > n, bad shapes)"""
    pass


class ValidationError(ApplicationError):
    """Data outside its declared domain"""
    pass


class EmptyDatasetError(ValidationError):
    """Dataset has no rows"""
    pass


class DatasetFormatError(ApplicationError):
    """Malformed dataset file"""
    pass


class DatasetConsistencyError(ApplicationError):
    """Dataset parts disagree with each other"""
    pass


class DatasetIOError(ApplicationError, OSError):
    """Dataset file ended early"""
    pass


class InsufficientSamplesError(ApplicationError):
    """Not enough samples of a class"""
    pass


class NotFoundError(ApplicationError):
    """Resource not found"""
    pass


class OptimizerError(ApplicationError):
    """Optimizer received a non-finite gradient"""
    pass


class TrainingError(ApplicationError):
    """Training diverged"""
    pass


class ScaleError(ApplicationError):
    """Problem too large for exact enumeration"""
    pass


class ConfigError(ApplicationError):
    """Invalid experiment configuration"""
    pass
