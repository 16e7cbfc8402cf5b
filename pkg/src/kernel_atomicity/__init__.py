"""Kernel atomicity: exact verification of fiber partitions for group homomorphisms, actions and linear maps."""

__version__ = "0.1.0"

from kernel_atomicity.cli import main  # noqa: E402

__all__ = ["main", "__version__"]
