"""HTTP scoring service: masked-LM fills and autoregressive conditionals."""

from .app import create_app
from .backends import CausalBackend, MaskedBackend

__version__ = "0.1.0"

__all__ = ["CausalBackend", "MaskedBackend", "create_app"]
