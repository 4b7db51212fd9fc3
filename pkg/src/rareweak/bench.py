"""Permutation-calibrated power, FDR, and gene-ranking benchmarks.

Every method here is calibrated the same way: a scalar set-level statistic,
oriented so larger means more signal, is compared against its own
permutation distribution.  The per-method statistics are

* ``HC``   higher criticism of two-sided p-values (t scores for
           quantitative traits, frequency-difference z scores for binary);
* ``HCm``  higher criticism of p-values from the sqrt(n-1)*rho scores
           (quantitative traits only);
* ``MinP`` the largest absolute marginal score (equivalent to the smallest
           p-value, kept on the score scale);
* ``LCT``  |sum of scores| / sqrt(ones' Sigma ones);
* ``QT``   scores' Sigma^-1 scores;
* ``DT``   Fisher combination of the whitened scores' p-values;

with Sigma the empirical column correlation of the *observed* panel, which
permutations of the response leave untouched.

Replicates draw fresh genotypes and fresh signal placements.  Each
replicate's seeds derive from the master seed and the replicate index, so
results are identical however replicates are split across workers.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import erfc
from scipy.stats import rankdata

from ._rng import TAG_GENE, TAG_PERMUTE, TAG_REPLICATE, TAG_TRAIT, derive_seed, substream
from .boundary import beta_from_r, signal_count
from .core_stats import P_FLOOR, GenotypeMatrix, Phenotype
from .detectors import _hc_max_rows, cholesky_lower
from .errors import (
    BadSampleSizeError,
    ConfigError,
    ConstantColumnError,
    DimensionMismatchError,
    EmptyGeneError,
    MonomorphicColumnError,
    NonPositiveQuadFormError,
    TooFewPermutationsError,
)
from .simgen import CoefficientScheme, LdSpec, SignalConfig, TraitModel, draw_signal_config, simulate_case_control, simulate_genotypes, simulate_quantitative

METHOD_NAMES = ("HC", "HCm", "MinP", "LCT", "QT", "DT")


@dataclass(frozen=True)
class MethodId:
    """One of the six benchmark methods, by name."""

    name: str

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise ConfigError(f"unknown method {self.name!r}; know {METHOD_NAMES}")

    def applicable_to(self, trait_kind: str) -> bool:
        # the correlation-score variant needs a quantitative response
        return not (self.name == "HCm" and trait_kind == "binary")


def _as_methods(methods: Sequence[str | MethodId], trait_kind: str) -> tuple[MethodId, ...]:
    out = tuple(m if isinstance(m, MethodId) else MethodId(str(m)) for m in methods)
    if not out:
        raise ConfigError("no methods requested")
    if len({m.name for m in out}) != len(out):
        raise ConfigError("duplicate methods requested")
    for m in out:
        if not m.applicable_to(trait_kind):
            raise ConfigError(f"method {m.name} is not applicable to {trait_kind} traits")
    return out


@dataclass(frozen=True)
class Scenario:
    """Everything one benchmark replicate needs to generate itself.

    ``r`` is bookkeeping: when a scenario is built from a calibrated
    strength exponent it is recorded here and surfaces in result tables;
    scenarios built directly from a coefficient leave it None.
    """

    L: int
    q: float
    ld: LdSpec
    trait: TraitModel
    n_signals: int
    base_beta: float
    scheme: CoefficientScheme
    n: int | None = None           # samples for additive traits
    r: float | None = None

    def __post_init__(self):
        if self.L < 2:
            raise BadSampleSizeError(f"need L >= 2, got {self.L}")
        if not (0.0 < self.q < 1.0):
            raise DimensionMismatchError(f"allele frequency must lie in (0, 1), got {self.q!r}")
        if self.base_beta < 0.0:
            raise DimensionMismatchError(f"base coefficient must be >= 0, got {self.base_beta!r}")
        if self.base_beta > 0.0 and not 1 <= self.n_signals <= self.L:
            raise DimensionMismatchError(f"need 1 <= n_signals <= L, got {self.n_signals}")
        if self.trait.kind == "additive":
            if self.n is None or self.n < 2:
                raise BadSampleSizeError("additive scenarios need n >= 2")
        elif self.trait.kind != "logistic":
            raise ConfigError(f"unknown trait kind {self.trait.kind!r}")

    @property
    def trait_kind(self) -> str:
        return "quantitative" if self.trait.kind == "additive" else "binary"

    @property
    def n_samples(self) -> int:
        if self.trait.kind == "additive":
            return self.n
        return self.trait.n_case + self.trait.n_control

    @property
    def r_or_beta(self) -> float:
        return self.r if self.r is not None else self.base_beta

    @classmethod
    def from_strength(cls, L: int, n: int, q: float, sigma: float, alpha: float,
                      r: float, ld: LdSpec, scheme: CoefficientScheme | None = None) -> "Scenario":
        """Calibrated additive scenario: rarity alpha fixes the signal count,
        strength r fixes the coefficient (see ``boundary.beta_from_r``)."""
        from .boundary import ArwScenario

        arw = ArwScenario(L=L, alpha=alpha, r=r, sigma=sigma, q=q, n=n)
        return cls(L=L, q=q, ld=ld, trait=TraitModel.additive(sigma),
                   n_signals=signal_count(L, alpha), base_beta=float(beta_from_r(arw)),
                   scheme=scheme or CoefficientScheme.fixed(), n=n, r=float(r))

    def null(self) -> "Scenario":
        return replace(self, base_beta=0.0, r=0.0 if self.r is not None else None)


# ---------------------------------------------------------------------------
# statistic kernels


def _stats_for_columns(X: np.ndarray, Y: np.ndarray, trait_kind: str,
                       needs: frozenset[str]) -> dict[str, np.ndarray]:
    """Set-level statistics for every response column in Y.

    X is the (n, L) panel shared by all columns; Y is (n, m).  Returns, per
    requested method, the m exceedance-oriented statistics.
    """
    n, L = X.shape
    out: dict[str, np.ndarray] = {}

    if trait_kind == "quantitative":
        if np.any(X.max(axis=0) == X.min(axis=0)):
            raise ConstantColumnError(int(np.flatnonzero(X.max(axis=0) == X.min(axis=0))[0]))
        Xc = X - X.mean(axis=0)
        xnorm = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
        Yc = Y - Y.mean(axis=0)
        ynorm = np.sqrt(np.einsum("ij,ij->j", Yc, Yc))
        rho = (Xc.T @ Yc) / (xnorm[:, None] * ynorm[None, :])
        np.clip(rho, -1.0, 1.0, out=rho)
        scores = np.sqrt(n - 2.0) * rho / np.sqrt(1.0 - rho * rho)  # t scale, (L, m)
        if "HCm" in needs:
            z = np.sqrt(n - 1.0) * rho
            out["HCm"] = _hc_max_rows(erfc(np.abs(z.T) / np.sqrt(2.0)))
    else:
        labels = Y
        n_case = float(labels[:, 0].sum())
        n_control = n - n_case
        if n_case == 0 or n_control == 0:
            raise DimensionMismatchError("label columns must contain both groups")
        p_all = X.mean(axis=0) / 2.0
        mono = (p_all == 0.0) | (p_all == 1.0)
        if np.any(mono):
            raise MonomorphicColumnError(int(np.flatnonzero(mono)[0]))
        p_case = (X.T @ labels) / (2.0 * n_case)
        p_control = (X.T @ (1.0 - labels)) / (2.0 * n_control)
        m_eff = 2.0 / (1.0 / n_case + 1.0 / n_control)
        scores = np.sqrt(m_eff) * (p_case - p_control) / np.sqrt(2.0 * p_all * (1.0 - p_all))[:, None]

    if "HC" in needs:
        out["HC"] = _hc_max_rows(erfc(np.abs(scores.T) / np.sqrt(2.0)))
    if "MinP" in needs:
        out["MinP"] = np.abs(scores).max(axis=0)

    if needs & {"LCT", "QT", "DT"}:
        sigma_hat = np.corrcoef(X, rowvar=False)
        sigma_hat = np.atleast_2d(sigma_hat)
        np.clip(sigma_hat, -1.0, 1.0, out=sigma_hat)
        np.fill_diagonal(sigma_hat, 1.0)
        if "LCT" in needs:
            denom = float(sigma_hat.sum())
            if denom <= 0.0:
                raise NonPositiveQuadFormError(f"aggregate variance {denom!r} is not positive")
            out["LCT"] = np.abs(scores.sum(axis=0)) / np.sqrt(denom)
        if needs & {"QT", "DT"}:
            low = cholesky_lower(sigma_hat)
            w = solve_triangular(low, scores, lower=True)
            if "QT" in needs:
                out["QT"] = np.einsum("ij,ij->j", w, w)
            if "DT" in needs:
                p = np.maximum(erfc(np.abs(w) / np.sqrt(2.0)), P_FLOOR)
                out["DT"] = -2.0 * np.log(p).sum(axis=0)
    return out


def _zero_signal(L: int) -> SignalConfig:
    return SignalConfig(support=np.array([0], dtype=np.int64), beta=np.zeros(L))


def _replicate_stats(scenario: Scenario, needs: frozenset[str], rep_seed: int,
                     n_perms: int) -> dict[str, np.ndarray]:
    """Observed-plus-permuted statistics for one replicate.

    Column 0 of each returned array is the observed statistic; columns
    1..n_perms come from permuted responses.
    """
    L = scenario.L
    has_signal = scenario.base_beta > 0.0 and scenario.n_signals > 0
    signal = (draw_signal_config(L, scenario.n_signals, scenario.scheme,
                                 scenario.base_beta, seed=rep_seed)
              if has_signal else _zero_signal(L))

    if scenario.trait.kind == "additive":
        X = simulate_genotypes(scenario.n, scenario.q, scenario.ld, seed=rep_seed, L=L)
        y = simulate_quantitative(X, signal, scenario.trait.sigma, seed=rep_seed).values
    else:
        X, pheno = simulate_case_control(scenario.q, scenario.ld, signal,
                                         scenario.trait.beta0, scenario.trait.n_case,
                                         scenario.trait.n_control, seed=rep_seed, L=L)
        y = pheno.values

    n = y.size
    Y = np.empty((n, 1 + n_perms))
    Y[:, 0] = y
    perm_rng = substream(rep_seed, TAG_PERMUTE)
    for i in range(n_perms):
        Y[:, 1 + i] = y[perm_rng.permutation(n)]
    return _stats_for_columns(X.entries, Y, scenario.trait_kind, needs)


# ---------------------------------------------------------------------------
# calibration and power


def _pooled_cutoff(nulls: np.ndarray, level: float) -> float:
    """ceil((1 - level) * m)-th order statistic of the pooled null sample."""
    m = nulls.size
    if m < 1:
        raise TooFewPermutationsError("empty null sample")
    k = int(np.ceil((1.0 - level) * m))
    k = min(max(k, 1), m)
    return float(np.partition(nulls, k - 1)[k - 1])


def _check_level(level: float):
    if not (0.0 < level < 1.0):
        raise ConfigError(f"level must lie in (0, 1), got {level!r}")


def permutation_cutoff(method: str | MethodId, X, y, n_perms: int, level: float,
                       seed: int) -> float:
    """Rejection cutoff for one method on one dataset from fresh permutations."""
    _check_level(level)
    if n_perms < 20.0 / level:
        raise TooFewPermutationsError(
            f"need at least {int(np.ceil(20.0 / level))} permutations at level {level}, got {n_perms}")
    Xa = X.entries if isinstance(X, GenotypeMatrix) else np.asarray(X, dtype=np.float64)
    if isinstance(y, Phenotype):
        kind, yv = y.kind, y.values
    else:
        yv = np.asarray(y, dtype=np.float64).ravel()
        kind = "quantitative"
    m = _as_methods([method], kind)[0]
    perm_rng = substream(seed, TAG_PERMUTE)
    n = yv.size
    Y = np.empty((n, n_perms))
    for i in range(n_perms):
        Y[:, i] = yv[perm_rng.permutation(n)]
    nulls = _stats_for_columns(Xa, Y, kind, frozenset({m.name}))[m.name]
    return _pooled_cutoff(nulls, level)


@dataclass(frozen=True)
class ScenarioResult:
    """Power of one method in one scenario, with its calibration."""

    scenario: Scenario
    method: str
    level: float
    cutoff: float
    power: float
    n_sims: int
    n_perms: int          # pooled null sample size behind the cutoff
    seed: int
    observed: np.ndarray | None = None
    nulls: np.ndarray | None = None


def _power_chunk(scenario: Scenario, needs: tuple[str, ...], seed: int,
                 perms_per_sim: int, lo: int, hi: int) -> dict[str, np.ndarray]:
    fs = frozenset(needs)
    stats = {name: np.empty((hi - lo, 1 + perms_per_sim)) for name in needs}
    for i in range(lo, hi):
        rep = _replicate_stats(scenario, fs, derive_seed(seed, TAG_REPLICATE, i), perms_per_sim)
        for name in needs:
            stats[name][i - lo] = rep[name]
    return stats


def _run_chunked(fn, n_items: int, workers: int, *args):
    """Split 0..n_items into contiguous chunks, run fn(*args, lo, hi) on each,
    return the chunk results in index order regardless of worker count."""
    workers = max(1, int(workers))
    if workers == 1 or n_items < 2:
        return [fn(*args, 0, n_items)]
    bounds = np.linspace(0, n_items, workers + 1).astype(int)
    jobs = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_chunk_call, [(fn, args, lo, hi) for lo, hi in jobs]))


def _chunk_call(packed):
    fn, args, lo, hi = packed
    return fn(*args, lo, hi)


def empirical_power(methods: Sequence[str | MethodId], scenario: Scenario,
                    n_sims: int, level: float, seed: int, perms_per_sim: int = 1,
                    workers: int = 1, retain: bool = False) -> tuple[ScenarioResult, ...]:
    """Monte Carlo power with a shared permutation-calibrated cutoff.

    Each simulation draws a fresh panel, fresh signal placement, and
    ``perms_per_sim`` permuted responses; the permuted statistics from all
    simulations are pooled into one null sample per method, and power is the
    fraction of observed statistics above the pooled cutoff.
    """
    _check_level(level)
    if n_sims < 100:
        raise BadSampleSizeError(f"need n_sims >= 100, got {n_sims}")
    if perms_per_sim < 1:
        raise TooFewPermutationsError("need at least one permutation per simulation")
    ms = _as_methods(methods, scenario.trait_kind)
    pooled = n_sims * perms_per_sim
    if pooled < 20.0 / level:
        raise TooFewPermutationsError(
            f"pooled null sample {pooled} too small for level {level}")

    needs = tuple(m.name for m in ms)
    chunks = _run_chunked(_power_chunk, n_sims, workers, scenario, needs, seed, perms_per_sim)
    results = []
    for m in ms:
        stacked = np.concatenate([c[m.name] for c in chunks], axis=0)
        observed = stacked[:, 0]
        nulls = stacked[:, 1:].ravel()
        cutoff = _pooled_cutoff(nulls, level)
        results.append(ScenarioResult(
            scenario=scenario, method=m.name, level=level, cutoff=cutoff,
            power=float(np.mean(observed > cutoff)), n_sims=n_sims, n_perms=pooled,
            seed=seed, observed=observed if retain else None,
            nulls=nulls if retain else None))
    return tuple(results)


# ---------------------------------------------------------------------------
# FDR over a mixed panel of genes


@dataclass(frozen=True)
class FdrCurve:
    """Empirical FDR of top-of-the-null-scale cutoffs on a gene mixture."""

    methods: tuple[str, ...]
    levels: np.ndarray
    fdr: np.ndarray              # (methods, levels)
    mean_rejections: np.ndarray  # (methods, levels)
    cutoffs: np.ndarray          # (methods, levels)
    scenario: Scenario
    n_sims: int
    n_genes: int
    n_signal_genes: int
    seed: int


def _fdr_chunk(scenario: Scenario, needs: tuple[str, ...], seed: int,
               n_genes: int, n_signal_genes: int, lo: int, hi: int) -> dict[str, np.ndarray]:
    """Observed and one-permutation statistics for every gene, sims lo..hi.

    Signal genes are the first ``n_signal_genes`` indices; genes are
    exchangeable so the labelling is arbitrary.  One shared response drives
    all genes in a simulation, and one shared permutation of it feeds the
    null pool.
    """
    fs = frozenset(needs)
    L, n = scenario.L, scenario.n
    out = {name: np.empty((hi - lo, n_genes, 2)) for name in needs}
    for i in range(lo, hi):
        rep_seed = derive_seed(seed, TAG_REPLICATE, i)
        panels = []
        genetic = np.zeros(n)
        for g in range(n_genes):
            gene_seed = derive_seed(rep_seed, TAG_GENE, g)
            Xg = simulate_genotypes(n, scenario.q, scenario.ld, seed=gene_seed, L=L)
            panels.append(Xg.entries)
            if g < n_signal_genes and scenario.base_beta > 0.0:
                cfg = draw_signal_config(L, scenario.n_signals, scenario.scheme,
                                         scenario.base_beta, seed=gene_seed)
                genetic += Xg.entries @ cfg.beta
        y = genetic + scenario.trait.sigma * substream(rep_seed, TAG_TRAIT).standard_normal(n)
        Y = np.empty((n, 2))
        Y[:, 0] = y
        Y[:, 1] = y[substream(rep_seed, TAG_PERMUTE).permutation(n)]
        for g in range(n_genes):
            stats = _stats_for_columns(panels[g], Y, "quantitative", fs)
            for name in needs:
                out[name][i - lo, g] = stats[name]
    return out


def fdr_curve(methods: Sequence[str | MethodId], scenario: Scenario,
              levels: Sequence[float], n_sims: int, n_genes: int,
              n_signal_genes: int, seed: int, workers: int = 1) -> FdrCurve:
    """Empirical FDR when a fraction of genes carry calibrated signals.

    Per simulation, ``n_genes`` independent panels share one response built
    from the ``n_signal_genes`` signal panels; each gene contributes one
    permuted statistic to a pooled null per method.  For each level, the
    cutoff is the pooled null's upper quantile and the reported FDR is the
    false-positive fraction among rejections, averaged over simulations
    (simulations with no rejections count as zero false discovery).
    """
    if scenario.trait.kind != "additive":
        raise ConfigError("fdr_curve supports additive scenarios")
    if not 0 <= n_signal_genes <= n_genes:
        raise DimensionMismatchError(f"need 0 <= n_signal_genes <= n_genes, got {n_signal_genes}/{n_genes}")
    if n_sims < 1:
        raise BadSampleSizeError(f"need n_sims >= 1, got {n_sims}")
    lv = np.asarray(list(levels), dtype=np.float64)
    if lv.size == 0 or np.any(lv <= 0.0) or np.any(lv >= 1.0):
        raise ConfigError("levels must be a non-empty collection inside (0, 1)")
    ms = _as_methods(methods, scenario.trait_kind)
    needs = tuple(m.name for m in ms)

    chunks = _run_chunked(_fdr_chunk, n_sims, workers, scenario, needs, seed,
                          n_genes, n_signal_genes)
    fdr = np.empty((len(ms), lv.size))
    rej = np.empty_like(fdr)
    cuts = np.empty_like(fdr)
    for mi, m in enumerate(ms):
        stats = np.concatenate([c[m.name] for c in chunks], axis=0)  # (n_sims, n_genes, 2)
        observed = stats[:, :, 0]
        nulls = stats[:, :, 1].ravel()
        for li, level in enumerate(lv):
            cut = _pooled_cutoff(nulls, float(level))
            rejected = observed > cut
            false = rejected[:, n_signal_genes:]
            per_sim = false.sum(axis=1) / np.maximum(rejected.sum(axis=1), 1)
            fdr[mi, li] = float(per_sim.mean())
            rej[mi, li] = float(rejected.sum(axis=1).mean())
            cuts[mi, li] = cut
    return FdrCurve(methods=needs, levels=lv, fdr=fdr, mean_rejections=rej,
                    cutoffs=cuts, scenario=scenario, n_sims=n_sims, n_genes=n_genes,
                    n_signal_genes=n_signal_genes, seed=seed)


# ---------------------------------------------------------------------------
# ranking fixed gene sets on one dataset


@dataclass(frozen=True)
class GeneRanking:
    """Permutation p-values and tie-averaged ranks per gene and method."""

    genes: tuple[str, ...]
    sizes: tuple[int, ...]
    methods: tuple[str, ...]
    pvalues: np.ndarray   # (methods, genes)
    ranks: np.ndarray     # (methods, genes)
    n_perms: int
    seed: int

    def average_ranks(self, gene_names: Sequence[str]) -> dict[str, float]:
        """Mean rank over a target subset, per method."""
        wanted = set(gene_names)
        missing = wanted - set(self.genes)
        if missing:
            raise EmptyGeneError(sorted(missing)[0], f"unknown gene(s) {sorted(missing)}")
        idx = [i for i, g in enumerate(self.genes) if g in wanted]
        return {m: float(self.ranks[mi, idx].mean()) for mi, m in enumerate(self.methods)}


def _rank_chunk(X: np.ndarray, Y: np.ndarray, gene_slices: tuple, trait_kind: str,
                needs: tuple[str, ...], lo: int, hi: int) -> dict[str, np.ndarray]:
    fs = frozenset(needs)
    out = {name: np.empty((hi - lo, Y.shape[1])) for name in needs}
    for gi in range(lo, hi):
        idx = gene_slices[gi]
        stats = _stats_for_columns(X[:, idx], Y, trait_kind, fs)
        for name in needs:
            out[name][gi - lo] = stats[name]
    return out


def rank_gene_sets(genes: Sequence[tuple[str, Sequence[int]]], X, y,
                   methods: Sequence[str | MethodId], n_perms: int, seed: int,
                   workers: int = 1) -> GeneRanking:
    """Rank gene sets on one dataset by permutation p-value.

    All genes share the same ``n_perms`` permuted responses.  A gene's
    p-value is (1 + #{permuted >= observed}) / (1 + n_perms); ranks are
    ascending in p with ties averaged.
    """
    if n_perms < 100:
        raise TooFewPermutationsError(f"need n_perms >= 100, got {n_perms}")
    Xa = X.entries if isinstance(X, GenotypeMatrix) else np.asarray(X, dtype=np.float64)
    if isinstance(y, Phenotype):
        kind, yv = y.kind, y.values
    else:
        yv = np.asarray(y, dtype=np.float64).ravel()
        kind = "quantitative"
    if yv.size != Xa.shape[0]:
        raise DimensionMismatchError(f"response length {yv.size} != {Xa.shape[0]} rows")
    ms = _as_methods(methods, kind)

    names: list[str] = []
    slices: list[np.ndarray] = []
    for name, idx in genes:
        ia = np.asarray(idx, dtype=np.int64)
        if ia.size == 0:
            raise EmptyGeneError(str(name))
        if np.any(ia < 0) or np.any(ia >= Xa.shape[1]):
            raise DimensionMismatchError(f"gene {name!r} has column indices outside the panel")
        names.append(str(name))
        slices.append(ia)
    if not names:
        raise EmptyGeneError("<none>", "no gene sets given")

    n = yv.size
    Y = np.empty((n, 1 + n_perms))
    Y[:, 0] = yv
    perm_rng = substream(seed, TAG_PERMUTE)
    for i in range(n_perms):
        Y[:, 1 + i] = yv[perm_rng.permutation(n)]

    needs = tuple(m.name for m in ms)
    chunks = _run_chunked(_rank_chunk, len(names), workers, Xa, Y, tuple(slices), kind, needs)
    pvals = np.empty((len(ms), len(names)))
    for mi, m in enumerate(ms):
        stats = np.concatenate([c[m.name] for c in chunks], axis=0)  # (genes, 1 + n_perms)
        exceed = (stats[:, 1:] >= stats[:, [0]]).sum(axis=1)
        pvals[mi] = (1.0 + exceed) / (1.0 + n_perms)
    ranks = np.vstack([rankdata(pvals[mi], method="average") for mi in range(len(ms))])
    return GeneRanking(genes=tuple(names), sizes=tuple(int(s.size) for s in slices),
                       methods=needs, pvalues=pvals, ranks=ranks, n_perms=n_perms, seed=seed)


# ---------------------------------------------------------------------------
# tabular serialisation (strings; the CLI owns file I/O)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV with floats at 17 significant digits, so reruns compare byte-wise."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


POWER_HEADER = ("method", "r_or_beta", "ld_design", "power", "cutoff", "n_sims", "n_perms", "seed")


def power_table_csv(results: Sequence[ScenarioResult]) -> str:
    rows = [(res.method, res.scenario.r_or_beta, res.scenario.ld.name, res.power,
             res.cutoff, res.n_sims, res.n_perms, res.seed) for res in results]
    return csv_text(POWER_HEADER, rows)


FDR_HEADER = ("method", "r_or_beta", "ld_design", "level", "fdr", "mean_rejections",
              "cutoff", "n_sims", "n_genes", "n_signal_genes", "seed")


def fdr_table_csv(curves: Sequence[FdrCurve]) -> str:
    rows = []
    for c in curves:
        for mi, m in enumerate(c.methods):
            for li in range(c.levels.size):
                rows.append((m, c.scenario.r_or_beta, c.scenario.ld.name,
                             c.levels[li], c.fdr[mi, li], c.mean_rejections[mi, li],
                             c.cutoffs[mi, li], c.n_sims, c.n_genes,
                             c.n_signal_genes, c.seed))
    return csv_text(FDR_HEADER, rows)


def ranking_csv(ranking: GeneRanking) -> str:
    header = ["gene", "snps"]
    for m in ranking.methods:
        header += [f"rank_{m}", f"pvalue_{m}"]
    rows = []
    for gi, g in enumerate(ranking.genes):
        row: list = [g, ranking.sizes[gi]]
        for mi in range(len(ranking.methods)):
            row += [ranking.ranks[mi, gi], ranking.pvalues[mi, gi]]
        rows.append(row)
    return csv_text(header, rows)
