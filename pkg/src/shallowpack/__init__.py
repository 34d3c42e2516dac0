"""shallowpack: bit-vector set systems, shallow packings, and their experiments."""

__version__ = "0.1.0"

from .kernels import backend as kernel_backend

__all__ = ["kernel_backend", "__version__"]
