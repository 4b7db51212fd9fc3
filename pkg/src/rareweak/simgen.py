"""Synthetic genotype panels with controlled column correlation, plus
additive and case/control trait models on top of them.

Genotypes are built at the haplotype level: each column gets a latent
standard normal, columns are mixed to a solved latent correlation, each
latent value is thresholded at the allele frequency's normal quantile to
give one allele, and two independent haplotype draws are summed.  The
latent correlation per column pair is solved numerically so that the
*genotype* correlation hits the requested target; summing two independent
haplotypes keeps the genotype correlation equal to the allele correlation
and the marginals exactly binomial(2, q).

Randomness is Philox-based with per-column substreams (see ``_rng``), so
simulated panels are reproducible and column j's draw does not depend on
how many columns sit to its right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.linalg import toeplitz as _toeplitz
from scipy.linalg.lapack import dpotrf
from scipy.special import expit, ndtr, ndtri

from ._rng import (
    RNG_ALGORITHM,
    TAG_CASE_CONTROL,
    TAG_GENOTYPE,
    TAG_SIGNAL,
    TAG_TRAIT,
    column_generators,
    derive_seed,
    substream,
)
from .core_stats import GenotypeMatrix, Phenotype
from .errors import (
    BadKError,
    BadSampleSizeError,
    DimensionMismatchError,
    EmptyGroupError,
    LatentNotPDError,
    NonFiniteInputError,
    NonPositiveSigmaError,
    NotPositiveDefiniteError,
    NotSquareError,
    QuotaStallError,
)

__all__ = [
    "RNG_ALGORITHM",
    "LdSpec",
    "build_ld",
    "six_toeplitz_designs",
    "solve_latent_correlation",
    "simulate_genotypes",
    "CoefficientScheme",
    "SignalConfig",
    "draw_signal_config",
    "TraitModel",
    "simulate_quantitative",
    "simulate_case_control",
]


# ---------------------------------------------------------------------------
# linkage designs


@dataclass(frozen=True, eq=False)
class LdSpec:
    """Declarative column-correlation design.

    kinds: ``identity``; ``toeplitz_banded`` (band k of the Toeplitz target
    is ``bands[k-1]``, zero beyond); ``poly_decay`` (off-diagonal (j, k) is
    scale * (1 + |j-k|)^-decay); ``explicit`` (a full matrix).
    """

    kind: str
    bands: tuple[float, ...] = ()
    scale: float = 0.0
    decay: float = 0.0
    matrix: np.ndarray | None = None

    @classmethod
    def identity(cls) -> "LdSpec":
        return cls(kind="identity")

    @classmethod
    def toeplitz(cls, *bands: float) -> "LdSpec":
        b = tuple(float(v) for v in bands)
        if not b:
            return cls.identity()
        if any(not np.isfinite(v) or abs(v) >= 1.0 for v in b):
            raise NonFiniteInputError(f"band values must lie in (-1, 1), got {b}")
        return cls(kind="toeplitz_banded", bands=b)

    @classmethod
    def poly_decay(cls, scale: float, decay: float) -> "LdSpec":
        # entries are scale*(1+lag)^-decay; the lag-1 entry must stay below 1
        if not np.isfinite(scale) or scale <= 0.0 or not np.isfinite(decay) or decay <= 0.0:
            raise NonFiniteInputError(f"need scale > 0 and decay > 0, got {scale!r}, {decay!r}")
        if scale * 2.0 ** -decay >= 1.0:
            raise NonFiniteInputError(
                f"scale {scale!r} with decay {decay!r} puts the first off-diagonal at or above 1")
        return cls(kind="poly_decay", scale=float(scale), decay=float(decay))

    @classmethod
    def explicit(cls, matrix) -> "LdSpec":
        m = np.asarray(matrix, dtype=np.float64)
        return cls(kind="explicit", matrix=m)

    @property
    def name(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "toeplitz_banded":
            return "toeplitz(" + ",".join(f"{b:g}" for b in self.bands) + ")"
        if self.kind == "poly_decay":
            return f"poly({self.scale:g},{self.decay:g})"
        return "explicit"

    def _cache_key(self):
        if self.kind == "explicit":
            return ("explicit", self.matrix.tobytes(), self.matrix.shape)
        return (self.kind, self.bands, self.scale, self.decay)


def _chol_or_minor(m: np.ndarray) -> tuple[np.ndarray | None, int]:
    c, info = dpotrf(m, lower=1, overwrite_a=0)
    if info != 0:
        return None, int(info)
    return np.tril(c), 0


def build_ld(spec: LdSpec, L: int) -> np.ndarray:
    """Materialise a design as an L x L correlation matrix, checked PD."""
    if L < 1:
        raise DimensionMismatchError(f"need L >= 1, got {L}")
    if spec.kind == "identity":
        return np.eye(L)
    if spec.kind == "toeplitz_banded":
        first = np.zeros(L)
        first[0] = 1.0
        nb = min(len(spec.bands), L - 1)
        first[1:1 + nb] = spec.bands[:nb]
        m = _toeplitz(first)
    elif spec.kind == "poly_decay":
        lag = np.abs(np.subtract.outer(np.arange(L), np.arange(L)))
        m = spec.scale * (1.0 + lag) ** (-spec.decay)
        np.fill_diagonal(m, 1.0)
    elif spec.kind == "explicit":
        m = np.array(spec.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape != (L, L):
            raise NotSquareError(f"explicit design must be {L} x {L}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NonFiniteInputError("explicit design contains non-finite values")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
            raise NotSquareError("explicit design must be symmetric")
        if not np.allclose(np.diag(m), 1.0, atol=1e-12, rtol=0.0):
            raise NonFiniteInputError("explicit design must have unit diagonal")
    else:
        raise DimensionMismatchError(f"unknown design kind {spec.kind!r}")
    _, info = _chol_or_minor(m)
    if info:
        raise NotPositiveDefiniteError(info, f"design {spec.name} (L={L}) fails at leading minor {info}")
    return m


def six_toeplitz_designs() -> tuple[tuple[str, LdSpec], ...]:
    """The six benchmark designs: independence plus five banded targets."""
    return (
        ("identity", LdSpec.identity()),
        ("toeplitz(0.3)", LdSpec.toeplitz(0.3)),
        ("toeplitz(0.25)", LdSpec.toeplitz(0.25)),
        ("toeplitz(0.2)", LdSpec.toeplitz(0.2)),
        ("toeplitz(0.25,0.3)", LdSpec.toeplitz(0.25, 0.3)),
        ("toeplitz(0.25,0.2)", LdSpec.toeplitz(0.25, 0.2)),
    )


# ---------------------------------------------------------------------------
# latent-correlation solving


def _bvn_cdf(h: float, k: float, rho: float) -> float:
    """P(Z1 <= h, Z2 <= k) for standard bivariate normal with correlation rho.

    One-dimensional adaptive quadrature of the conditional cdf; accurate to
    ~1e-12 absolute, which is far below the 1e-8 solve tolerance.
    """
    if rho == 0.0:
        return float(ndtr(h) * ndtr(k))
    if rho >= 1.0:
        return float(ndtr(min(h, k)))
    if rho <= -1.0:
        return float(max(0.0, ndtr(h) + ndtr(k) - 1.0))
    s = np.sqrt(1.0 - rho * rho)

    def integrand(z):
        return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi) * ndtr((k - rho * z) / s)

    val, _ = quad(integrand, -np.inf, h, epsabs=1e-12, epsrel=1e-12, limit=200)
    return float(val)


_LATENT_CACHE: dict[tuple[float, float, float], float] = {}


def solve_latent_correlation(rho_target: float, q_j: float, q_k: float,
                             tol: float = 1e-8) -> float:
    """Latent normal correlation that yields a given Bernoulli correlation.

    For alleles thresholded at the q_j / q_k quantiles, returns the latent
    rho_z whose implied allele correlation matches ``rho_target`` to within
    ``tol``.  Targets outside the Frechet bounds for these marginals raise
    ``UnattainableError``; targets exactly on a bound return +-1.
    """
    from .errors import UnattainableError

    t = float(rho_target)
    if not np.isfinite(t) or abs(t) > 1.0:
        raise NonFiniteInputError(f"target correlation must lie in [-1, 1], got {rho_target!r}")
    for q in (q_j, q_k):
        if not np.isfinite(q) or not (0.0 < q < 1.0):
            raise NonFiniteInputError(f"allele frequency must lie in (0, 1), got {q!r}")
    if t == 0.0:
        return 0.0
    key = (t, float(q_j), float(q_k))
    hit = _LATENT_CACHE.get(key)
    if hit is not None:
        return hit

    denom = np.sqrt(q_j * (1.0 - q_j) * q_k * (1.0 - q_k))
    rho_hi = (min(q_j, q_k) - q_j * q_k) / denom
    rho_lo = (max(0.0, q_j + q_k - 1.0) - q_j * q_k) / denom
    if t > rho_hi + 1e-12 or t < rho_lo - 1e-12:
        raise UnattainableError(
            f"target {t:g} outside attainable [{rho_lo:.6g}, {rho_hi:.6g}] "
            f"for q = ({q_j:g}, {q_k:g})")
    if t >= rho_hi - 1e-12:
        _LATENT_CACHE[key] = 1.0
        return 1.0
    if t <= rho_lo + 1e-12:
        _LATENT_CACHE[key] = -1.0
        return -1.0

    h = float(ndtri(q_j))
    k = float(ndtri(q_k))

    def allele_corr(z: float) -> float:
        return (_bvn_cdf(h, k, z) - q_j * q_k) / denom

    lo, hi = -1.0, 1.0
    f_lo = allele_corr(lo) - t   # = rho_lo - t < 0
    z = 0.0
    for _ in range(200):
        z = 0.5 * (lo + hi)
        f = allele_corr(z) - t
        if abs(f) <= tol:
            break
        if (f < 0.0) == (f_lo < 0.0):
            lo, f_lo = z, f
        else:
            hi = z
    _LATENT_CACHE[key] = z
    return z


_LATENT_CHOL_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _latent_chol(spec: LdSpec, L: int, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Target correlation matrix and the Cholesky factor of its latent
    counterpart, cached per (design, L, q)."""
    key = (spec._cache_key(), L, q.tobytes())
    hit = _LATENT_CHOL_CACHE.get(key)
    if hit is not None:
        return hit
    target = build_ld(spec, L)
    if spec.kind == "identity":
        out = (target, np.eye(L))
        _LATENT_CHOL_CACHE[key] = out
        return out
    latent = np.eye(L)
    jj, kk = np.nonzero(np.triu(target, k=1))
    for j, k in zip(jj.tolist(), kk.tolist()):
        z = solve_latent_correlation(float(target[j, k]), float(q[j]), float(q[k]))
        latent[j, k] = latent[k, j] = z
    chol, info = _chol_or_minor(latent)
    if info:
        raise LatentNotPDError(info, f"latent matrix for design {spec.name} fails at leading minor {info}")
    out = (target, chol)
    _LATENT_CHOL_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# genotype panels


def _as_freqs(q, L: int | None) -> np.ndarray:
    qa = np.asarray(q, dtype=np.float64)
    if qa.ndim == 0:
        if L is None:
            raise DimensionMismatchError("scalar q needs an explicit L")
        qa = np.full(L, float(qa))
    elif L is not None and qa.size != L:
        raise DimensionMismatchError(f"q has length {qa.size}, expected {L}")
    if not np.all(np.isfinite(qa)) or np.any(qa <= 0.0) or np.any(qa >= 1.0):
        raise NonFiniteInputError("allele frequencies must lie in (0, 1)")
    return qa


def simulate_genotypes(n: int, q, ld, seed: int, L: int | None = None) -> GenotypeMatrix:
    """Panel of n samples whose columns hit the design's correlation targets.

    ``ld`` is an :class:`LdSpec` or an explicit target correlation matrix;
    ``q`` is a scalar or per-column allele frequency.  Marginals are exactly
    binomial(2, q_j) by construction.
    """
    if n < 2:
        raise BadSampleSizeError(f"need n >= 2, got {n}")
    if isinstance(ld, LdSpec):
        spec = ld
        if L is None:
            qa = np.asarray(q, dtype=np.float64)
            if qa.ndim == 0:
                raise DimensionMismatchError("give L explicitly with a scalar q and an LdSpec")
            L = qa.size
    else:
        spec = LdSpec.explicit(ld)
        L = spec.matrix.shape[0]
    qa = _as_freqs(q, L)
    _, chol = _latent_chol(spec, L, qa)

    thresholds = ndtri(qa)  # allele present when latent value falls below
    gens = column_generators(seed, (TAG_GENOTYPE,), L)
    raw = np.empty((2, n, L))
    for j, g in enumerate(gens):
        raw[:, :, j] = g.standard_normal((2, n))
    counts = np.zeros((n, L), dtype=np.float64)
    identity = spec.kind == "identity"
    for a in (0, 1):
        latent = raw[a] if identity else raw[a] @ chol.T
        counts += latent <= thresholds
    return GenotypeMatrix(entries=counts)


# ---------------------------------------------------------------------------
# signal placement and traits


@dataclass(frozen=True)
class CoefficientScheme:
    """How per-signal coefficients relate to the base magnitude.

    ``fixed``: every signal coefficient equals the base.  ``random_sign``:
    base magnitude, independent fair sign per signal.  ``uniform_range``:
    positive magnitude drawn uniformly in [lo, hi] * base.
    """

    kind: str
    lo: float = 1.0
    hi: float = 1.0

    @classmethod
    def fixed(cls) -> "CoefficientScheme":
        return cls(kind="fixed")

    @classmethod
    def random_sign(cls) -> "CoefficientScheme":
        return cls(kind="random_sign")

    @classmethod
    def uniform_range(cls, lo: float, hi: float) -> "CoefficientScheme":
        if not (0.0 < lo <= hi) or not np.isfinite(hi):
            raise NonFiniteInputError(f"need 0 < lo <= hi, got {lo!r}, {hi!r}")
        return cls(kind="uniform_range", lo=float(lo), hi=float(hi))

    @property
    def name(self) -> str:
        if self.kind == "uniform_range":
            return f"uniform_range({self.lo:g},{self.hi:g})"
        return self.kind


@dataclass(frozen=True, eq=False)
class SignalConfig:
    """Realised signal: which columns carry effects and with what coefficients."""

    support: np.ndarray   # sorted, distinct column indices
    beta: np.ndarray      # length-L coefficient vector, zero off support

    def __post_init__(self):
        s = np.asarray(self.support, dtype=np.int64)
        b = np.asarray(self.beta, dtype=np.float64)
        if s.size == 0 or s.size != np.unique(s).size:
            raise BadKError("support must be non-empty and distinct")
        if np.any(s < 0) or np.any(s >= b.size):
            raise BadKError("support indices outside 0..L-1")
        object.__setattr__(self, "support", np.sort(s))
        object.__setattr__(self, "beta", b)

    @property
    def L(self) -> int:
        return self.beta.size

    @property
    def K(self) -> int:
        return self.support.size


def draw_signal_config(L: int, K: int, scheme: CoefficientScheme,
                       base_beta: float, seed: int) -> SignalConfig:
    """Place K signals uniformly at random and draw their coefficients."""
    if not 1 <= K <= L:
        raise BadKError(f"need 1 <= K <= L, got K={K}, L={L}")
    if not np.isfinite(base_beta) or base_beta <= 0.0:
        raise NonFiniteInputError(f"base coefficient must be positive, got {base_beta!r}")
    rng = substream(seed, TAG_SIGNAL)
    support = np.sort(rng.choice(L, size=K, replace=False)).astype(np.int64)
    coeffs = np.full(K, float(base_beta))
    if scheme.kind == "uniform_range":
        coeffs *= rng.uniform(scheme.lo, scheme.hi, size=K)
    elif scheme.kind == "random_sign":
        coeffs *= rng.integers(0, 2, size=K) * 2.0 - 1.0
    elif scheme.kind != "fixed":
        raise NonFiniteInputError(f"unknown coefficient scheme {scheme.kind!r}")
    beta = np.zeros(L)
    beta[support] = coeffs
    return SignalConfig(support=support, beta=beta)


@dataclass(frozen=True)
class TraitModel:
    """Trait generator family: additive Gaussian or logistic case/control."""

    kind: str
    sigma: float = 1.0
    beta0: float = 0.0
    n_case: int = 0
    n_control: int = 0

    @classmethod
    def additive(cls, sigma: float = 1.0) -> "TraitModel":
        if not np.isfinite(sigma) or sigma < 0.0:
            raise NonPositiveSigmaError(f"sigma must be non-negative, got {sigma!r}")
        return cls(kind="additive", sigma=float(sigma))

    @classmethod
    def logistic(cls, beta0: float, n_case: int, n_control: int) -> "TraitModel":
        if n_case < 1 or n_control < 1:
            raise EmptyGroupError(f"need positive quotas, got {n_case} / {n_control}")
        if not np.isfinite(beta0):
            raise NonFiniteInputError(f"intercept must be finite, got {beta0!r}")
        return cls(kind="logistic", beta0=float(beta0), n_case=int(n_case), n_control=int(n_control))


def simulate_quantitative(X: GenotypeMatrix, signal: SignalConfig,
                          sigma: float, seed: int) -> Phenotype:
    """Additive trait: X beta plus independent N(0, sigma^2) noise, zero intercept."""
    if not np.isfinite(sigma) or sigma < 0.0:
        raise NonPositiveSigmaError(f"sigma must be non-negative, got {sigma!r}")
    if signal.L != X.n_snps:
        raise DimensionMismatchError(f"signal is for L={signal.L}, panel has {X.n_snps}")
    y = X.entries @ signal.beta
    if sigma > 0.0:
        y = y + sigma * substream(seed, TAG_TRAIT).standard_normal(X.n)
    return Phenotype(values=y, kind="quantitative")


def simulate_case_control(q, ld, signal: SignalConfig, beta0: float,
                          n_case: int, n_control: int, seed: int,
                          L: int | None = None, batch: int = 2048,
                          stall_after: int = 4_194_304) -> tuple[GenotypeMatrix, Phenotype]:
    """Retrospective case/control panel under a logistic disease model.

    Population genotype rows are drawn in batches; each row becomes a case
    with probability expit(beta0 + x . beta) and is kept while its group's
    quota is open.  Raises ``QuotaStallError`` when ``stall_after`` rows
    have been drawn and an unfilled group's acceptance rate sits below 1e-6.
    """
    if n_case < 1 or n_control < 1:
        raise EmptyGroupError(f"need positive quotas, got {n_case} / {n_control}")
    if batch < 1:
        raise BadSampleSizeError(f"batch must be positive, got {batch}")
    if L is None:
        L = signal.L
    if signal.L != L:
        raise DimensionMismatchError(f"signal is for L={signal.L}, panel has {L}")

    cases: list[np.ndarray] = []
    controls: list[np.ndarray] = []
    got_case = got_control = 0
    drawn = 0
    b = 0
    while got_case < n_case or got_control < n_control:
        child = derive_seed(seed, TAG_CASE_CONTROL, b)
        Xb = simulate_genotypes(max(batch, 2), q, ld, seed=child, L=L).entries
        u = substream(child, TAG_TRAIT).random(Xb.shape[0])
        is_case = u < expit(beta0 + Xb @ signal.beta)
        if got_case < n_case:
            take = Xb[is_case][: n_case - got_case]
            if take.size:
                cases.append(take)
                got_case += take.shape[0]
        if got_control < n_control:
            take = Xb[~is_case][: n_control - got_control]
            if take.size:
                controls.append(take)
                got_control += take.shape[0]
        drawn += Xb.shape[0]
        b += 1
        if drawn >= stall_after:
            for label, got, need in (("case", got_case, n_case), ("control", got_control, n_control)):
                if got < need and got / drawn < 1e-6:
                    raise QuotaStallError(
                        f"{label} acceptance rate {got}/{drawn} below 1e-6 with quota unfilled")

    X = np.vstack(cases + controls)
    y = np.concatenate([np.ones(n_case), np.zeros(n_control)])
    return GenotypeMatrix(entries=X), Phenotype(values=y, kind="binary")
