"""Why trusting a prediction blindly is dangerous, and how H-Aware hedges."""
from binpack_ml import (
    adversarial_prediction,
    adversarial_sigma1,
    adversarial_sigma2,
    first_fit,
    frequencies,
    h_aware,
    l1_error,
    profile_packing,
)

K, n = 100, 10_000
f = adversarial_prediction(K)

# %% Same prediction, two inputs: one matches it exactly, the other is all tiny items.
for name, seq in [("sigma1", adversarial_sigma1(n, K)), ("sigma2", adversarial_sigma2(n, K))]:
    eta = l1_error(frequencies(seq, K), f)
    print(f"{name}: eta={eta:.2f}  ProfilePacking={profile_packing(seq, f, 5000, K).cost()}  "
          f"FirstFit={first_fit(seq, K).cost()}")

# %% With an error bound H, H-Aware only follows the prediction when it is safe to.
seq = adversarial_sigma2(n, K)
for H in (0.0, 0.01, 1.0):
    p = h_aware(seq, f, H, eps=0.1, c_a=1.7, k=K)
    print(f"H={H}: branch={p.meta['branch']} cost={p.cost()} (threshold {float(p.meta['threshold'])})")
