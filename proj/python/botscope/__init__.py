"""Offline botnet C&C detection over packet traces."""

try:
    from ._botscope import *  # noqa: F401,F403
    from . import _botscope as _core
except ImportError:  # extension built out-of-tree (e.g. test builds)
    from _botscope import *  # noqa: F401,F403
    import _botscope as _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "1.0.0"
