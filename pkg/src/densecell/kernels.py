"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``DENSECELL_PURE=1`` to force the numpy path.
"""

import os

from . import _fallback

try:
    if os.environ.get("DENSECELL_PURE", "") not in ("", "0"):
        raise ImportError("pure-python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def disc_chunk(gaps, gains, offset, target, inv_pi_lam, index0, skip, model, backend=None):
    """One chunk of the disc interference accumulation.

    Returns ``(count, last_arrival, first_radius, sum, compensation)``.
    """
    backend = backend or BACKEND
    spec = model.kernel_spec() if backend == "cython" else None
    if spec is not None and _compiled is not None:
        code, params = spec
        return _compiled.disc_chunk(gaps, gains, offset, target, inv_pi_lam,
                                    index0, skip, code, params)
    return _fallback.disc_chunk(gaps, gains, offset, target, inv_pi_lam, index0, skip, model)
