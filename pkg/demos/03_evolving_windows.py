"""Adaptive(w) on a sequence whose distribution changes every epoch."""
from binpack_ml import adaptive, best_fit, first_fit, l2_bound
from binpack_ml.workload import Mode, SequenceSpec, epoch_shapes, make_sequence

spec = SequenceSpec(Mode.EVOLVING_WEIBULL, n=200_000, k=100, epoch=50_000, seed=4)
seq = make_sequence(spec).tolist()
print("epoch shapes:", [round(s, 2) for s in epoch_shapes(spec)])
print(f"FirstFit {first_fit(seq, 100).cost()}  BestFit {best_fit(seq, 100).cost()}  L2 {l2_bound(seq, 100)}")

# %% Small windows estimate frequencies poorly; large ones lag behind a shift.
for w in (500, 2000, 5000, 20_000, 100_000):
    p = adaptive(seq, w, 5000, 100)
    print(f"w={w:>6}: {p.cost()} bins, {p.meta['plans_built']} plans, {p.meta['groups_opened']} groups")
