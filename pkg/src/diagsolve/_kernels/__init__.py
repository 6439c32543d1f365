"""Hot-kernel dispatch: compiled Cython core when built, pure Python otherwise.

Set ``DIAGSOLVE_KERNELS=python`` to force the pure-Python kernels.  The
compiled kernels work in int64, so calls whose magnitudes could leave the
62-bit envelope are routed to the arbitrary-precision Python versions.
"""

from __future__ import annotations

import os

from . import _pure

try:
    if os.environ.get("DIAGSOLVE_KERNELS", "").lower() == "python":
        raise ImportError("pure kernels requested")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_LIMIT = 1 << 62


def _fits(coeffs, k, bound) -> bool:
    return sum(abs(a) for a in coeffs) * bound**k < _LIMIT


def count_zero_sums(coeffs, k, values):
    values = list(values)
    bound = max((abs(v) for v in values), default=0)
    if _compiled is not None and _fits(coeffs, k, bound):
        return _compiled.count_zero_sums(tuple(coeffs), k, values)
    return _pure.count_zero_sums(tuple(coeffs), k, values)


def min_norm(coeffs, k, B):
    if _compiled is not None and _fits(coeffs, k, B):
        return _compiled.min_norm(tuple(coeffs), k, B)
    return _pure.min_norm(tuple(coeffs), k, B)


FFT_THRESHOLD = 2048
_LIMB_BITS = 12


def _fft_step(acc, h):
    """Exact cyclic convolution of big-integer ``acc`` with small counts ``h``.

    ``acc`` is split into 12-bit limbs so every limb product stays far below
    2^53; each rounded limb result is checked against the exact identity
    sum(conv) = sum(limb) * sum(h).  Returns None if a check fails.
    """
    import numpy as np

    n = len(acc)
    acc_obj = np.array(acc, dtype=object)
    hsum = sum(h)
    hf = np.fft.rfft(np.asarray(h, dtype=float))
    mask = (1 << _LIMB_BITS) - 1
    out = np.zeros(n, dtype=object)
    top = max(acc).bit_length()
    for shift in range(0, max(top, 1), _LIMB_BITS):
        limb = ((acc_obj >> shift) & mask).astype(np.int64)
        if not limb.any():
            continue
        conv = np.rint(np.fft.irfft(np.fft.rfft(limb.astype(float)) * hf, n)).astype(np.int64)
        if int(conv.sum()) != int(limb.sum()) * hsum or conv.min() < 0:
            return None
        out += conv.astype(object) << shift
    return [int(v) for v in out]


def cyclic_convolve(hists, modulus):
    hists = [[int(v) for v in h] for h in hists]
    total = 1
    for h in hists:
        total *= sum(h)
    # limb values < 2^12 times ||h||_1 <= 2^28 keeps rounding exact in float64
    if modulus >= FFT_THRESHOLD and max(sum(h) for h in hists) < 1 << 28:
        acc = [0] * modulus
        acc[0] = 1
        for h in hists:
            acc = _fft_step(acc, h)
            if acc is None:
                break
        else:
            return acc
    if _compiled is not None and total < _LIMIT:
        return _compiled.cyclic_convolve(hists, modulus)
    return _pure.cyclic_convolve(hists, modulus)


def gauss_sum_table(q, k):
    import numpy as np

    if _compiled is not None and q < 3_000_000_000:
        return _compiled.gauss_sum_table(q, k)
    return np.asarray(_pure.gauss_sum_table(q, k), dtype=complex)


def backends():
    """Mapping name -> kernel module, for benchmarks and cross-checks."""
    out = {"python": _pure}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
