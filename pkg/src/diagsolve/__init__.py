"""Local solubility, exact counting and singular-series tools for diagonal equations."""

__version__ = "0.1.0"

from .errors import DiagsolveError, DomainError, NumericalError, ResourceError  # noqa: E402
from .forms import DiagonalForm  # noqa: E402

__all__ = ["DiagonalForm", "DiagsolveError", "DomainError", "NumericalError", "ResourceError", "__version__"]
