"""Array kernels with two interchangeable backends.

``numba`` compiles the hot loops with ``@njit``; ``numpy`` is a pure-vectorized
fallback with identical results. Selection order:

1. ``LOGICORPUS_KERNELS=numba`` or ``=numpy`` forces a backend (an explicit
   request for numba raises if numba is not importable);
2. otherwise numba is used when available, numpy when not.

Both backends expose the same four functions:

- ``token_spans(cls)`` — token boundaries from per-character classes
- ``token_ids(cp, starts, ends, tables)`` — intern tokens against a lexicon
- ``match_spans(ids, bounds, tables)`` — leftmost-longest phrase matching
- ``channel_u64(base, channel, ks)`` — vectorized counter-hash draws
"""

from __future__ import annotations

import os
from types import ModuleType

_ENV_VAR = "LOGICORPUS_KERNELS"
_cache: dict[str, ModuleType] = {}


def available_backends() -> tuple[str, ...]:
    names = ["numpy"]
    try:
        import numba  # noqa: F401

        names.insert(0, "numba")
    except ImportError:
        pass
    return tuple(names)


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` (or the environment's choice)."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "").strip().lower() or "auto"
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"unknown kernel backend {name!r}; expected 'numba' or 'numpy'"
        )
    if name == "auto":
        try:
            return get_backend("numba")
        except ImportError:
            return get_backend("numpy")
    if name not in _cache:
        if name == "numba":
            from . import nb_backend as mod
        else:
            from . import np_backend as mod
        _cache[name] = mod
    return _cache[name]


def backend_name(mod: ModuleType | None = None) -> str:
    if mod is None:
        mod = get_backend()
    return mod.NAME
