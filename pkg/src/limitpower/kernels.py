"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``LIMITPOWER_PURE=1`` to
force the numpy fallback.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("LIMITPOWER_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"


def use(name: str) -> None:
    """Switch backend at runtime (``"compiled"`` or ``"python"``)."""
    global _active, BACKEND
    if name == "compiled":
        if compiled_backend is None:
            raise RuntimeError("compiled kernels are not built")
        _active = compiled_backend
    elif name == "python":
        _active = python_backend
    else:
        raise ValueError(name)
    BACKEND = name


def apply_tables(entries, idx, base, codes, labels):
    return _active.apply_tables(entries, idx, base, codes, labels)


def congruence_closure(trans, labels):
    return _active.congruence_closure(trans, labels)


def principal_congruences(trans):
    return _active.principal_congruences(trans)
