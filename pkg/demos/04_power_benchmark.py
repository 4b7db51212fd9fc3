"""Side-by-side power of the six set tests as signals strengthen.

Runs the permutation-calibrated benchmark at a reduced replicate count:
three calibrated strength exponents under same-sign coefficients, then
the strongest point again with random-sign coefficients to show the
linear-combination test collapsing when effects cancel.
"""

import time

from rareweak import CoefficientScheme, LdSpec, Scenario, empirical_power

METHODS = ("HC", "HCm", "MinP", "LCT", "QT", "DT")
PROTO = dict(L=100, n=1000, q=0.4, sigma=1.0, alpha=0.76, ld=LdSpec.identity())
N_SIMS, LEVEL, SEED = 150, 0.05, 11


def run(r, scheme):
    sc = Scenario.from_strength(**PROTO, r=r, scheme=scheme)
    return empirical_power(METHODS, sc, n_sims=N_SIMS, level=LEVEL,
                           seed=SEED, perms_per_sim=3)


def main():
    t0 = time.perf_counter()
    print(f"{N_SIMS} simulations per cell, level {LEVEL}, "
          f"panel {PROTO['n']}x{PROTO['L']}, 3 signals")
    print()
    rows = {r: run(r, CoefficientScheme.fixed()) for r in (0.4, 0.65, 0.9)}
    print(f"{'r':>5} " + "".join(f"{m:>7}" for m in METHODS))
    for r, results in rows.items():
        print(f"{r:5.2f} " + "".join(f"{res.power:7.2f}" for res in results))

    mixed = run(0.9, CoefficientScheme.random_sign())
    print("\nrandom-sign coefficients at r=0.90:")
    print(f"{'':>5} " + "".join(f"{m:>7}" for m in METHODS))
    print(f"{'':>5} " + "".join(f"{res.power:7.2f}" for res in mixed))

    by = {res.method: res.power for res in mixed}
    print(f"\nsign-mixing starves the linear-combination test "
          f"(LCT {by['LCT']:.2f} vs HC {by['HC']:.2f}): summed effects cancel")
    print("while exceedance-based scans only see magnitudes.")
    print(f"\n[{time.perf_counter() - t0:.1f}s]")


if __name__ == "__main__":
    main()
