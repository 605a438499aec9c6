"""Direct-summation DFT of intraday log-price vectors and amplitude change rates.

For an ``N``-point vector ``P`` (``N = 349`` for the default session), and
``w = 1 .. (N - 1) // 2``::

    a(w) = 2/N * sum_j P(j) cos(2 pi w j / N)
    b(w) = 2/N * sum_j P(j) sin(2 pi w j / N)
    c(w) = sqrt(a(w)**2 + b(w)**2)

with ``j = 1 .. N``. No detrending or tapering is applied. Each vector is
centred before summation; the complete-cycle sums make that exact in real
arithmetic, and it removes the cancellation a ~10.8 log-price level would
otherwise cause against coefficients of order 1e-4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import UndefinedAggregateError


@dataclass(frozen=True)
class FourierCoefficients:
    a: np.ndarray
    b: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(1, self.a.shape[-1] + 1)


@dataclass(frozen=True)
class PeriodAmplitude:
    c_bar: np.ndarray
    n_days: int
    period: str = "before"
    symbol: str = ""


@dataclass(frozen=True)
class SpectralChangeRate:
    """Per-frequency log ratio; NaN where either period aggregate is zero."""

    f: np.ndarray
    symbol: str = ""
    degenerate: tuple[int, ...] = field(default=())


def n_frequencies(n_points: int) -> int:
    return (n_points - 1) // 2


@lru_cache(maxsize=8)
def fourier_basis(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Cosine and sine tables of shape ``(n_frequencies, n_points)``.

    ``w * j`` is reduced modulo ``n_points`` in integers before scaling, so
    every angle lies in ``[0, 2 pi)`` and is rounded once.
    """
    if n_points < 1:
        raise ValueError(f"need at least 1 point, got {n_points}")
    w = np.arange(1, n_frequencies(n_points) + 1, dtype=np.int64)[:, None]
    j = np.arange(1, n_points + 1, dtype=np.int64)[None, :]
    angle = (2.0 * np.pi / n_points) * ((w * j) % n_points)
    cos, sin = np.cos(angle), np.sin(angle)
    cos.setflags(write=False)
    sin.setflags(write=False)
    return cos, sin


def dft_coefficients(P) -> FourierCoefficients:
    """Cosine/sine coefficients for ``w = 1 .. (N - 1) // 2``.

    A 1-D input is summed in ascending ``j`` with numpy's pairwise reduction.
    A 2-D input (one vector per row) goes through a matrix product; the two
    paths agree to ~1e-14 relative.
    """
    x = np.asarray(P, dtype=np.float64)
    if x.ndim not in (1, 2):
        raise ValueError(f"expected a vector or a matrix of vectors, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("log-price vector contains non-finite values")
    n = x.shape[-1]
    cos, sin = fourier_basis(n)
    x = x - x.mean(axis=-1, keepdims=True)
    scale = 2.0 / n
    if x.ndim == 1:
        return FourierCoefficients(scale * (cos * x).sum(axis=1),
                                   scale * (sin * x).sum(axis=1))
    return FourierCoefficients(scale * (x @ cos.T), scale * (x @ sin.T))


def amplitude_vector(coeffs: FourierCoefficients) -> np.ndarray:
    return np.hypot(coeffs.a, coeffs.b)


def amplitude_spectrum(P) -> np.ndarray:
    return amplitude_vector(dft_coefficients(P))


def period_amplitude(amplitudes, period: str = "before", symbol: str = "") -> PeriodAmplitude:
    """Per-frequency RMS over the accepted days (one row per day)."""
    c = np.asarray(amplitudes, dtype=np.float64)
    if c.ndim == 1:
        c = c[None, :]
    if c.shape[0] == 0:
        raise UndefinedAggregateError(
            f"{symbol or 'stock'}: no accepted days in the {period} period")
    return PeriodAmplitude(np.sqrt(np.mean(c * c, axis=0)), c.shape[0], period, symbol)


def spectral_change_rate(before: PeriodAmplitude, after: PeriodAmplitude) -> SpectralChangeRate:
    """``ln(c_bar_after / c_bar_before)`` per frequency.

    Frequencies where either aggregate is zero come back as NaN and are
    listed in ``degenerate`` (1-based ``w``).
    """
    b, a = before.c_bar, after.c_bar
    if b.shape != a.shape:
        raise ValueError(f"shape mismatch {b.shape} vs {a.shape}")
    bad = (b <= 0) | (a <= 0)
    f = np.full(b.shape, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        f[~bad] = np.log(a[~bad] / b[~bad])
    degenerate = tuple(int(w) + 1 for w in np.flatnonzero(bad))
    return SpectralChangeRate(f, before.symbol or after.symbol, degenerate)


def parseval_gap(P) -> float:
    """``sum (P - mean)^2 - N/2 * sum c^2``; zero up to rounding for odd N."""
    x = np.asarray(P, dtype=np.float64)
    n = x.shape[-1]
    c = amplitude_spectrum(x)
    energy = math.fsum((x - x.mean()) ** 2)
    return energy - 0.5 * n * math.fsum(c * c)
