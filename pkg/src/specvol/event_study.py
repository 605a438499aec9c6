"""Cross-sectional means, t-statistics and per-frequency error bars.

Report files written by :func:`assemble_report`:

* ``summary.csv``  -- ``window_label,n,mean,sd,se,t_stat``
* ``profile.csv``  -- ``window_label,w,n_w,mean_w,se_w,lo_w,hi_w``
* ``<window>/exclusions.csv`` -- ``symbol,day,reason``
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import InsufficientSampleError

ERROR_BAR_MULTIPLIER = 2.3


@dataclass(frozen=True)
class CrossSectionSummary:
    label: str
    n: int
    mean: float
    sd: float
    se: float
    t_stat: float

    @property
    def degenerate(self) -> bool:
        return self.sd == 0.0


@dataclass(frozen=True)
class FrequencyProfile:
    label: str
    w: np.ndarray
    n: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    se: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    k: float = ERROR_BAR_MULTIPLIER

    def significant(self) -> np.ndarray:
        """Frequencies whose interval lies strictly above zero."""
        return self.w[self.lo > 0]


def cross_section(values, label: str = "") -> CrossSectionSummary:
    """Mean, sample SD, standard error and one-sample t against zero.

    When every value is equal the t-statistic is undefined and reported
    as NaN.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size < 2:
        raise InsufficientSampleError(f"{label or 'cross-section'}: need at least 2 values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{label or 'cross-section'}: non-finite values")
    n = x.size
    mean = math.fsum(x) / n
    sd = math.sqrt(math.fsum((x - mean) ** 2) / (n - 1))
    se = sd / math.sqrt(n)
    t = mean / se if se > 0 else math.nan
    return CrossSectionSummary(label, n, mean, sd, se, t)


def frequency_profile(f, label: str = "", k: float = ERROR_BAR_MULTIPLIER) -> FrequencyProfile:
    """Per-frequency cross-section of an ``(n_stocks, n_freq)`` change-rate matrix.

    NaN entries (stocks degenerate at that frequency) are dropped for that
    frequency only.
    """
    m = np.asarray(f, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected (n_stocks, n_freq) matrix, got shape {m.shape}")
    n_freq = m.shape[1]
    out = {key: np.empty(n_freq) for key in ("mean", "sd", "se")}
    counts = np.empty(n_freq, dtype=np.int64)
    for i in range(n_freq):
        column = m[:, i]
        column = column[~np.isnan(column)]
        if column.size < 2:
            raise InsufficientSampleError(
                f"{label or 'profile'}: w={i + 1} has {column.size} contributing stocks")
        s = cross_section(column, label)
        counts[i] = s.n
        out["mean"][i], out["sd"][i], out["se"][i] = s.mean, s.sd, s.se
    return FrequencyProfile(
        label, np.arange(1, n_freq + 1), counts, out["mean"], out["sd"], out["se"],
        out["mean"] - k * out["se"], out["mean"] + k * out["se"], k,
    )


def fmt(x) -> str:
    """Shortest round-trip decimal text for a number."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def window_dirname(label: str) -> str:
    return label.replace("..", "_to_")


def _write_lines(path: Path, header: str, rows: Iterable[Sequence]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def write_summary(path, summaries: Sequence[CrossSectionSummary]) -> None:
    _write_lines(Path(path), "window_label,n,mean,sd,se,t_stat",
                 ((s.label, s.n, s.mean, s.sd, s.se, s.t_stat) for s in summaries))


def write_profile(path, profiles: Sequence[FrequencyProfile]) -> None:
    def rows():
        for p in profiles:
            for i in range(len(p.w)):
                yield (p.label, p.w[i], p.n[i], p.mean[i], p.se[i], p.lo[i], p.hi[i])
    _write_lines(Path(path), "window_label,w,n_w,mean_w,se_w,lo_w,hi_w", rows())


def write_exclusions(path, rows: Iterable[tuple[str, str, str]]) -> None:
    _write_lines(Path(path), "symbol,day,reason", sorted(rows))


def assemble_report(out_dir, summaries: Sequence[CrossSectionSummary],
                    profiles: Sequence[FrequencyProfile],
                    exclusions: Mapping[str, Iterable[tuple[str, str, str]]]) -> list[Path]:
    """Write the RV summary, the frequency profile and per-window exclusion logs.

    Returns the written paths in a fixed order.
    """
    if not summaries:
        raise ValueError("no analysed windows to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "summary.csv", out / "profile.csv"]
    write_summary(written[0], summaries)
    write_profile(written[1], profiles)
    for s in summaries:
        d = out / window_dirname(s.label)
        d.mkdir(exist_ok=True)
        path = d / "exclusions.csv"
        write_exclusions(path, exclusions.get(s.label, ()))
        written.append(path)
    return written
