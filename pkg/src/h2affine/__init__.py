"""Composition operators C f = f o phi_a with phi_a(z) = a z + 1 - a on the
Hardy space H^2, at finite truncation degree with explicit error bookkeeping."""

__version__ = "0.1.0"

from .h2core import H2Function, constant, monomial, polynomial  # noqa: E402
from .symbols import AffineSymbol, compose  # noqa: E402

__all__ = ["H2Function", "AffineSymbol", "compose", "polynomial", "constant", "monomial",
           "__version__"]
