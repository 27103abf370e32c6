"""Exact simulation of qudit entanglement distillation with generalized beam splitters."""
from .qudit import DomainError, ResourceLimitError

__version__ = "0.1.0"

__all__ = ["DomainError", "ResourceLimitError", "__version__"]
