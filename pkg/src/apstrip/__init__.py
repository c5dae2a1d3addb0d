"""Almost periodic functions on a strip: distances, Fourier-Bohr analysis and potentials."""

from .model import DomainError, SpecError, StripSpec, evaluate, loads, dumps

__all__ = ["DomainError", "SpecError", "StripSpec", "evaluate", "loads", "dumps"]
