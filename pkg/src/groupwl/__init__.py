"""Weisfeiler-Leman refinement on finite groups given by multiplication tables."""

from .errors import GroupWLError
from .group import ColoredGroup, Group, validate

__all__ = ["ColoredGroup", "Group", "GroupWLError", "validate"]
__version__ = "0.1.0"
