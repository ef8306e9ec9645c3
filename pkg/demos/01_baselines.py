"""Classical online packing on a Weibull workload.

Run with ``python demos/01_baselines.py``.
"""
import numpy as np

from binpack_ml import best_fit, first_fit, first_fit_decreasing, l2_bound
from binpack_ml.workload import SequenceSpec, generate

# %% A fixed-distribution sequence: 50k items, bin capacity 100.
seq, divisor = generate(SequenceSpec(n=50_000, k=100, shape=3.0, seed=1))
print(f"{len(seq)} items, mean size {seq.mean():.1f}, scaling divisor {divisor:.1f}")
print("size histogram (deciles):", np.histogram(seq, bins=10, range=(1, 101))[0])

# %% Online algorithms see one item at a time; FFD sorts first, so it is an offline reference.
items = seq.tolist()
lb = l2_bound(items, 100)
for name, algo in [("FirstFit", first_fit), ("BestFit", best_fit), ("FFD", first_fit_decreasing)]:
    cost = algo(items, 100).cost()
    print(f"{name:>9}: {cost} bins ({100 * (cost / lb - 1):.2f}% above L2 = {lb})")
