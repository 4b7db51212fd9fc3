"""Marginal association statistics and their two-sided p-values.

Everything downstream (detectors, benchmarks, the command line) reduces a
genotype panel to one score per column.  Four scores are provided:

* ``zscores_known_sigma`` -- inner product of the centred column with the
  response, scaled by a *known* noise standard deviation; exactly standard
  normal per column under the null when the noise truly is Gaussian.
* ``zscores_from_correlation`` -- sqrt(n-1) times the sample correlation.
* ``tstats_from_correlation`` -- the usual simple-regression t statistic,
  sqrt(n-2) * rho / sqrt(1 - rho^2).
* ``case_control_zscores`` -- difference of per-group allele frequencies on
  the z scale, for binary traits.

Scores are mapped to p-values by the two-sided standard normal tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import erfc

from .errors import (
    BadSampleSizeError,
    ConstantColumnError,
    DegenerateCorrelationError,
    DimensionMismatchError,
    EmptyGroupError,
    MonomorphicColumnError,
    NonFiniteInputError,
    NonPositiveSigmaError,
)

# floor for p-values so downstream logs never see an exact zero
P_FLOOR = 1e-300

TraitKind = Literal["quantitative", "binary"]
StatKind = Literal["r_sigma", "r", "t", "d"]


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class GenotypeMatrix:
    """Samples-by-SNPs panel of minor-allele counts.

    ``entries`` is float64 so that imputed columns (missing cells replaced by
    the column average) are representable; simulated panels contain exact
    integers in {0, 1, 2}.
    """

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2:
            raise DimensionMismatchError(f"genotype entries must be 2-D, got shape {e.shape}")
        if e.shape[0] < 2:
            raise BadSampleSizeError(f"need at least 2 samples, got {e.shape[0]}")
        if e.shape[1] < 1:
            raise DimensionMismatchError("need at least 1 column")
        if not np.all(np.isfinite(e)):
            raise NonFiniteInputError("genotype entries contain non-finite values")
        if e.min() < 0.0 or e.max() > 2.0:
            raise NonFiniteInputError("genotype entries must lie in [0, 2] allele counts")
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def n_snps(self) -> int:
        return self.entries.shape[1]

    def maf_hat(self) -> np.ndarray:
        """Per-column empirical minor-allele frequency (column mean / 2)."""
        return self.entries.mean(axis=0) / 2.0


@dataclass(frozen=True)
class Phenotype:
    """Response vector, either a quantitative trait or 0/1 case status."""

    values: np.ndarray
    kind: TraitKind = "quantitative"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size < 2:
            raise BadSampleSizeError(f"need at least 2 phenotype values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteInputError("phenotype contains non-finite values")
        if self.kind == "binary" and not np.all((v == 0.0) | (v == 1.0)):
            raise NonFiniteInputError("binary phenotype must contain only 0 and 1")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def n_case(self) -> int:
        if self.kind != "binary":
            raise EmptyGroupError("n_case is only defined for binary phenotypes")
        return int(np.sum(self.values == 1.0))

    @property
    def n_control(self) -> int:
        if self.kind != "binary":
            raise EmptyGroupError("n_control is only defined for binary phenotypes")
        return int(np.sum(self.values == 0.0))


@dataclass(frozen=True)
class MarginalStats:
    """Per-column scores plus their two-sided normal p-values."""

    kind: StatKind
    values: np.ndarray
    pvalues: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != self.pvalues.shape:
            raise DimensionMismatchError("values and pvalues must share a shape")


# ---------------------------------------------------------------------------
# helpers


def _as_genotype_array(X) -> np.ndarray:
    if isinstance(X, GenotypeMatrix):
        return X.entries
    a = np.asarray(X, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatchError(f"genotype array must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInputError("genotype array contains non-finite values")
    return a


def _as_response_array(y, n: int) -> np.ndarray:
    if isinstance(y, Phenotype):
        v = y.values
    else:
        v = np.asarray(y, dtype=np.float64).ravel()
        if not np.all(np.isfinite(v)):
            raise NonFiniteInputError("response contains non-finite values")
    if v.size != n:
        raise DimensionMismatchError(f"response length {v.size} != sample count {n}")
    return v


def _centered_columns(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centred copy of X and per-column Euclidean norms; flags constants.

    Constancy is detected by max == min, which is exact, rather than by a
    tolerance on the centred norm.
    """
    col_min = X.min(axis=0)
    col_max = X.max(axis=0)
    constant = col_max == col_min
    if np.any(constant):
        raise ConstantColumnError(int(np.flatnonzero(constant)[0]))
    Xc = X - X.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    return Xc, norms


def normal_sf(x) -> np.ndarray | float:
    """Upper tail of the standard normal, accurate far into the tail."""
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


# ---------------------------------------------------------------------------
# statistics


def marginal_correlations(X, y) -> np.ndarray:
    """Sample correlation between each column of X and the response."""
    Xa = _as_genotype_array(X)
    ya = _as_response_array(y, Xa.shape[0])
    if ya.max() == ya.min():
        raise ConstantColumnError(-1, "response is constant")
    Xc, norms = _centered_columns(Xa)
    yc = ya - ya.mean()
    rho = (Xc.T @ yc) / (norms * np.sqrt(yc @ yc))
    return np.clip(rho, -1.0, 1.0)


def zscores_known_sigma(X, y, sigma: float) -> np.ndarray:
    """Centred-column inner products scaled by a known noise sd.

    For column x with centred version xc, the score is xc . y / (sigma ||xc||).
    Centring y changes nothing since xc sums to zero.
    """
    if not np.isfinite(sigma) or sigma <= 0.0:
        raise NonPositiveSigmaError(f"sigma must be positive, got {sigma!r}")
    Xa = _as_genotype_array(X)
    ya = _as_response_array(y, Xa.shape[0])
    Xc, norms = _centered_columns(Xa)
    return (Xc.T @ ya) / (sigma * norms)


def zscores_from_correlation(rho, n: int) -> np.ndarray:
    """sqrt(n-1) * rho, the correlation on the z scale."""
    if n < 2:
        raise BadSampleSizeError(f"need n >= 2, got {n}")
    r = np.asarray(rho, dtype=np.float64)
    if not np.all(np.isfinite(r)):
        raise NonFiniteInputError("correlations contain non-finite values")
    if np.any(np.abs(r) > 1.0):
        raise DegenerateCorrelationError(int(np.flatnonzero(np.abs(r) > 1.0)[0]),
                                         "correlations must lie in [-1, 1]")
    return np.sqrt(n - 1.0) * r


def tstats_from_correlation(rho, n: int) -> np.ndarray:
    """Simple-regression t statistic, sqrt(n-2) * rho / sqrt(1 - rho^2)."""
    if n < 3:
        raise BadSampleSizeError(f"need n >= 3, got {n}")
    r = np.asarray(rho, dtype=np.float64)
    if not np.all(np.isfinite(r)):
        raise NonFiniteInputError("correlations contain non-finite values")
    if np.any(np.abs(r) >= 1.0):
        raise DegenerateCorrelationError(int(np.flatnonzero(np.abs(r) >= 1.0)[0]))
    return np.sqrt(n - 2.0) * r / np.sqrt(1.0 - r * r)


def case_control_zscores(X, y) -> np.ndarray:
    """Allele-frequency difference between cases and controls, z scale.

    With per-group frequencies p1 (cases, y == 1) and p0 (controls), pooled
    frequency p, and m the harmonic-mean per-group sample size
    2 / (1/n_case + 1/n_control), the score is

        sqrt(m) * (p1 - p0) / sqrt(2 p (1 - p)).
    """
    Xa = _as_genotype_array(X)
    if isinstance(y, Phenotype):
        if y.kind != "binary":
            raise EmptyGroupError("case/control scores need a binary phenotype")
        ya = _as_response_array(y, Xa.shape[0])
    else:
        ya = _as_response_array(y, Xa.shape[0])
        if not np.all((ya == 0.0) | (ya == 1.0)):
            raise NonFiniteInputError("binary response must contain only 0 and 1")
    case = ya == 1.0
    n_case = int(case.sum())
    n_control = ya.size - n_case
    if n_case == 0 or n_control == 0:
        raise EmptyGroupError(f"need both groups non-empty, got {n_case} cases / {n_control} controls")

    p_case = Xa[case].mean(axis=0) / 2.0
    p_control = Xa[~case].mean(axis=0) / 2.0
    p_all = Xa.mean(axis=0) / 2.0
    mono = (p_all == 0.0) | (p_all == 1.0)
    if np.any(mono):
        raise MonomorphicColumnError(int(np.flatnonzero(mono)[0]))
    m = 2.0 / (1.0 / n_case + 1.0 / n_control)
    return np.sqrt(m) * (p_case - p_control) / np.sqrt(2.0 * p_all * (1.0 - p_all))


def pvalues_two_sided(stats) -> np.ndarray:
    """Two-sided standard normal p-values, floored at 1e-300.

    Computed as erfc(|s| / sqrt 2), which keeps full relative accuracy far
    into the tail where 2 * (1 - cdf) would cancel to zero.
    """
    s = np.asarray(stats, dtype=np.float64)
    if not np.all(np.isfinite(s)):
        raise NonFiniteInputError("statistics contain non-finite values")
    return np.maximum(erfc(np.abs(s) / np.sqrt(2.0)), P_FLOOR)


def marginal_stats(X, y, kind: StatKind, sigma: float | None = None) -> MarginalStats:
    """One-call bundle: scores of the requested kind plus their p-values."""
    Xa = _as_genotype_array(X)
    n = Xa.shape[0]
    if kind == "r_sigma":
        if sigma is None:
            raise NonPositiveSigmaError("kind 'r_sigma' needs an explicit sigma")
        values = zscores_known_sigma(Xa, y, sigma)
    elif kind == "r":
        values = zscores_from_correlation(marginal_correlations(Xa, y), n)
    elif kind == "t":
        values = tstats_from_correlation(marginal_correlations(Xa, y), n)
    elif kind == "d":
        values = case_control_zscores(Xa, y)
    else:
        raise DimensionMismatchError(f"unknown statistic kind {kind!r}")
    return MarginalStats(kind=kind, values=values, pvalues=pvalues_two_sided(values))
