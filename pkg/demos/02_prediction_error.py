"""How Hybrid(lambda) degrades as the frequency prediction gets worse.

Predictions come from prefixes of the sequence: a short prefix gives a noisy
estimate of the size frequencies, a long one an accurate estimate.
"""
from fractions import Fraction

from binpack_ml import first_fit, frequencies, hybrid, l2_bound
from binpack_ml.harness import average_by_rounded_error
from binpack_ml.workload import SequenceSpec, make_sequence, prefix_prediction, prefix_sizes

K, M = 100, 5000
seq = make_sequence(SequenceSpec(n=100_000, k=K, seed=0)).tolist()
truth = frequencies(seq, K)
print(f"FirstFit {first_fit(seq, K).cost()}   L2 {l2_bound(seq, K)}")

# %% Every fifth prefix size from the standard 101-point grid.
lambdas = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
print("b       eta    " + "  ".join(f"H({lam})".rjust(8) for lam in lambdas))
for b in prefix_sizes()[::20]:
    f_pred, eta = prefix_prediction(seq, b, K, truth)
    costs = [hybrid(seq, f_pred, lam, M, K).cost() for lam in lambdas]
    print(f"{b:<7} {eta:.3f}  " + "  ".join(f"{c:8d}" for c in costs))

# %% Averaging across sequences buckets records by rounded error, as below.
from binpack_ml.harness import ExperimentRecord  # noqa: E402

recs = [ExperimentRecord("hybrid", "", 0, K, M, s, -1, e, c, 0, 0.0, 0.0)
        for s, e, c in [(0, 0.231, 100), (1, 0.228, 150), (2, 0.234, 350)]]
print("bucketed:", average_by_rounded_error(recs))
