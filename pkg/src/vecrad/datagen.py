"""Synthetic samples with controlled spectra, and dataset file I/O.

Datasets are plain text: one vector per line, comma-separated, decimals
carrying full round-trip precision, no header.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .linalg import DataSample
from .sampling import RngStream


@dataclass(frozen=True)
class SpectrumSpec:
    """Target covariance spectrum for generated data.

    Rows are drawn Gaussian with the requested eigenvalue profile, then
    optionally projected to the unit sphere.  Normalization distorts the
    spectrum slightly; all downstream quantities read the realized
    covariance, so only the realized spectrum matters.
    """

    d: int
    eigenvalues: np.ndarray
    unit_norm: bool = True

    def __post_init__(self):
        eigs = np.asarray(self.eigenvalues, dtype=np.float64)
        if self.d < 1 or eigs.shape != (self.d,):
            raise ValueError("need one eigenvalue per dimension")
        if np.any(eigs < 0) or not np.all(np.isfinite(eigs)):
            raise ValueError("eigenvalues must be finite and nonnegative")
        if not np.any(eigs > 0):
            raise ValueError("need at least one positive eigenvalue")
        object.__setattr__(self, "eigenvalues", eigs)
        eigs.setflags(write=False)

    @staticmethod
    def whitened(d: int, d_eff: Optional[int] = None, unit_norm: bool = True) -> "SpectrumSpec":
        d_eff = d if d_eff is None else d_eff
        if not 1 <= d_eff <= d:
            raise ValueError("need 1 <= d_eff <= d")
        eigs = np.zeros(d)
        eigs[:d_eff] = 1.0
        return SpectrumSpec(d=d, eigenvalues=eigs, unit_norm=unit_norm)

    @staticmethod
    def power_law(d: int, exponent: float, unit_norm: bool = True) -> "SpectrumSpec":
        if exponent < 0:
            raise ValueError("exponent must be nonnegative")
        eigs = np.arange(1, d + 1, dtype=np.float64) ** (-exponent)
        return SpectrumSpec(d=d, eigenvalues=eigs, unit_norm=unit_norm)

    @staticmethod
    def custom(eigenvalues: Sequence[float], unit_norm: bool = True) -> "SpectrumSpec":
        eigs = np.asarray(list(eigenvalues), dtype=np.float64)
        return SpectrumSpec(d=eigs.size, eigenvalues=eigs, unit_norm=unit_norm)


def generate(spec: SpectrumSpec, N: int, stream: RngStream) -> DataSample:
    """Draw N rows with the requested spectrum, deterministically."""
    if N < 1:
        raise ValueError("N must be >= 1")
    gen = stream.generator()
    scale = np.sqrt(spec.eigenvalues)
    x = gen.standard_normal((N, spec.d)) * scale
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms == 0.0):  # measure-zero guard, keeps rows nonzero
        bad = norms == 0.0
        x[bad] = gen.standard_normal((int(bad.sum()), spec.d)) * scale
        norms = np.linalg.norm(x, axis=1)
    if spec.unit_norm:
        x = x / norms[:, None]
    return DataSample(x)


def save_dataset(sample: DataSample, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in sample.vectors:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_dataset(path: str) -> DataSample:
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ValueError(f"line {lineno}: expected {width} values, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ValueError(f"line {lineno}: non-numeric value in {line!r}") from None
    if not rows:
        raise ValueError("empty sample")
    return DataSample(np.array(rows, dtype=np.float64))
