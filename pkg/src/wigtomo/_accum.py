"""Neumaier-compensated accumulation of array partial sums."""

import numpy as np


class CompensatedSum:
    """Running elementwise sum of equally shaped arrays.

    Chunks are added in a fixed order, and each chunk's partial is merged with
    Neumaier's compensation, so totals do not depend on how many chunks the
    data was split into beyond the last few ulps.  Complex input is split
    into real and imaginary parts.
    """

    def __init__(self, shape, dtype=float):
        self.complex = np.issubdtype(np.dtype(dtype), np.complexfloating)
        full = tuple(shape) if isinstance(shape, tuple) else (int(shape),)
        if self.complex:
            full = (2,) + full
        self._s = np.zeros(full)
        self._c = np.zeros(full)

    def add(self, part):
        part = np.asarray(part)
        x = np.stack([part.real, part.imag]) if self.complex else part.astype(float)
        s = self._s
        t = s + x
        big = np.abs(s) >= np.abs(x)
        self._c += np.where(big, (s - t) + x, (x - t) + s)
        self._s = t

    @property
    def value(self):
        total = self._s + self._c
        return total[0] + 1j * total[1] if self.complex else total
