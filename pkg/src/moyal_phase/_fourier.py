"""Offset-aware discrete Fourier sums on uniform lattices."""
from __future__ import annotations

import numpy as np


def lattice_dft(f: np.ndarray, t0: float, dt: float, w0: float, sign: int, axis: int = -1) -> np.ndarray:
    """Evaluate ``g_m = sum_k f_k exp(sign*i*t_k*w_m)`` along ``axis``.

    ``t_k = t0 + k*dt`` and ``w_m = w0 + m*dw`` with ``dt*dw = 2*pi/n``; the
    lattice offsets enter as pre/post phase factors around a plain FFT.
    """
    f = np.moveaxis(np.asarray(f, dtype=complex), axis, -1)
    n = f.shape[-1]
    dw = 2 * np.pi / (n * dt)
    k = np.arange(n)
    pre = np.exp(sign * 1j * k * dt * w0)
    post = np.exp(sign * 1j * t0 * (w0 + k * dw))
    if sign < 0:
        g = np.fft.fft(f * pre, axis=-1)
    else:
        g = np.fft.ifft(f * pre, axis=-1) * n
    return np.moveaxis(g * post, -1, axis)


def spectral_shift(f: np.ndarray, shifts: tuple, spacings: tuple) -> np.ndarray:
    """Band-limited periodic interpolation ``f(x + s)`` on every listed axis.

    The Nyquist coefficient of each axis is multiplied by cos(k_N s), which
    keeps real-valued inputs real.
    """
    out = np.fft.fftn(np.asarray(f, dtype=complex), axes=tuple(range(len(shifts))))
    for axis, (s, d) in enumerate(zip(shifts, spacings)):
        n = out.shape[axis]
        k = 2 * np.pi * np.fft.fftfreq(n, d=d)
        phase = np.exp(1j * k * s)
        if n % 2 == 0:
            phase[n // 2] = np.cos(np.pi / d * s)
        shape = [1] * out.ndim
        shape[axis] = n
        out = out * phase.reshape(shape)
    return np.fft.ifftn(out, axes=tuple(range(len(shifts))))
