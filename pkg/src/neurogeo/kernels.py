"""Backend selection for the modular hot loops.

The compiled extension is preferred; set ``NEUROGEO_PURE_PYTHON=1`` to force
the pure-Python fallback.
"""
import os

BACKEND = "python"

if os.environ.get("NEUROGEO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import mul_packed, rank_mod_p, rref_mod_p  # noqa: F401

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass

if BACKEND == "python":
    from ._pykernels import mul_packed, rank_mod_p, rref_mod_p  # noqa: F401

__all__ = ["BACKEND", "mul_packed", "rank_mod_p", "rref_mod_p"]
