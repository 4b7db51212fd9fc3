"""From detecting one set to screening many: FDR curves and gene ranking.

First an empirical false-discovery curve over a mixed panel where a tenth
of the genes carry calibrated signals, at two signal strengths.  Then the
single-dataset view: twelve fixed gene sets ranked by permutation
p-value, with one planted gene that should surface at the top.
"""

import numpy as np

from rareweak import (
    CoefficientScheme,
    LdSpec,
    Scenario,
    draw_signal_config,
    fdr_curve,
    rank_gene_sets,
    simulate_genotypes,
)

PROTO = dict(L=30, n=400, q=0.4, sigma=1.0, alpha=0.76, ld=LdSpec.identity())
LEVELS = (0.05, 0.1, 0.2)
SEED = 23


def main():
    print("empirical FDR, 60 genes with 6 carrying signals, 6 simulations:")
    print(f"{'level':>6} {'FDR r=0.4':>10} {'FDR r=0.9':>10}")
    curves = {r: fdr_curve(["HC"], Scenario.from_strength(**PROTO, r=r),
                           levels=LEVELS, n_sims=6, n_genes=60,
                           n_signal_genes=6, seed=SEED)
              for r in (0.4, 0.9)}
    for i, lv in enumerate(LEVELS):
        print(f"{lv:6.2f} {curves[0.4].fdr[0, i]:10.2f} {curves[0.9].fdr[0, i]:10.2f}")
    print("stronger signals push true positives past any cutoff first,")
    print("so the discovery stream gets cleaner as r grows.")

    # one dataset: 12 genes of 25 SNPs, signals planted inside gene 5
    L_gene, n_genes, n = 25, 12, 600
    sc = Scenario.from_strength(L=L_gene, n=n, q=0.4, sigma=1.0, alpha=0.76,
                                r=1.2, ld=LdSpec.identity())
    X = simulate_genotypes(n, 0.4, LdSpec.identity(), seed=SEED, L=L_gene * n_genes)
    cfg = draw_signal_config(L_gene, sc.n_signals, CoefficientScheme.fixed(),
                             sc.base_beta, seed=SEED)
    beta = np.zeros(L_gene * n_genes)
    beta[4 * L_gene:5 * L_gene] = cfg.beta
    rng = np.random.default_rng(SEED + 1)
    y = X.entries @ beta + rng.standard_normal(n)

    genes = [(f"gene_{g + 1:02d}", list(range(g * L_gene, (g + 1) * L_gene)))
             for g in range(n_genes)]
    ranking = rank_gene_sets(genes, X.entries, y, ["HC", "QT"], n_perms=400, seed=SEED)

    print(f"\nranking 12 gene sets, signals planted in gene_05 "
          f"(beta={sc.base_beta:.3f} x{sc.n_signals}):")
    print(f"{'gene':>8} {'HC rank':>8} {'HC p':>8} {'QT rank':>8} {'QT p':>8}")
    for gi, g in enumerate(ranking.genes):
        mark = " <- planted" if g == "gene_05" else ""
        print(f"{g:>8} {ranking.ranks[0, gi]:8.1f} {ranking.pvalues[0, gi]:8.4f} "
              f"{ranking.ranks[1, gi]:8.1f} {ranking.pvalues[1, gi]:8.4f}{mark}")


if __name__ == "__main__":
    main()
