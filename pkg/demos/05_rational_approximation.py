"""
How well can the loop close with partial knowledge of j
=======================================================

Only ``k`` decimals of the coupling are known. For each sampled coupling
the best ``s / 2n`` with ``n <= 10^k`` is found, and the distribution of the
remaining infidelity is summarized by its empirical CDF.
"""

import time

import numpy as np

from bellrecon.ratapprox import fraction_with_fidelity, search_best, sweep

for j in (0.25, np.pi / 10, 0.7071067811865476):
    c = search_best(j, 5)
    print(f"j={j:.10f}  n={c.n:6d} s={c.s:6d}  delta={c.delta:+.3e}  1-F={c.cost:.3e}")

start = time.perf_counter()
records, om = sweep(10_000, 5, seed=2024)
print(f"sweep of {len(records)} couplings in {time.perf_counter() - start:.2f} s")
print("fraction with F >= 0.8:", fraction_with_fidelity(records, 0.8))

costs = np.array([r.one_minus_f_max for r in records])
for q in (1e-12, 1e-10, 1e-9):
    print(f"Omega(1-F <= {q:.0e}) = {np.mean(costs <= q):.3f}")
