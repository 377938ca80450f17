"""Pick the closed-loop kernel at import time.

The compiled extension is used when it was built; set ``PIDLOOP_PURE=1`` to
force the pure-Python fallback.
"""

import importlib
import os


def load(name):
    """Return the kernel module for ``"compiled"`` or ``"pure"``."""
    if name == "compiled":
        return importlib.import_module("pidloop._kernels")
    if name == "pure":
        return importlib.import_module("pidloop._pure")
    raise ValueError(f"unknown backend {name!r}")


def available():
    names = ["pure"]
    try:
        load("compiled")
    except ImportError:
        pass
    else:
        names.insert(0, "compiled")
    return names


if os.environ.get("PIDLOOP_PURE", "").strip() not in ("", "0"):
    BACKEND = "pure"
else:
    BACKEND = available()[0]

kernel = load(BACKEND)
run_loop = kernel.run_loop
integrate_array = kernel.integrate_array
