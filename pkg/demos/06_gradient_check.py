#!/usr/bin/env python3
# Verifying the classifier's analytic gradients against central finite
# differences, the same check the `slascore gradcheck` command runs.

import numpy as np

from slascore import ClassifierConfig, init_params, loss_and_grad, SplitMix64
from slascore.gradcheck import check_gradients, run_gradcheck

config = ClassifierConfig()
rng = SplitMix64(2025)
params = init_params(config, 32, rng)

batch_rng = np.random.default_rng(0)
x = batch_rng.normal(size=(4, 32))
aux = batch_rng.normal(size=(4, 2))
labels = batch_rng.integers(1, 6, size=4)

loss, grads = loss_and_grad(params, x, aux, labels)
print(f"batch loss: {loss:.6f}")
print(f"gradient shapes: proj_w {grads.proj_w.shape}, proj_b {grads.proj_b.shape}, "
      f"pred_w {grads.pred_w.shape}, pred_b {grads.pred_b.shape}")

# Perturb each sampled entry by +/- 1e-5 and compare slopes.
errors = check_gradients(params, x, aux, labels, max_entries_per_tensor=40)
print("\nmax relative error vs central differences (h = 1e-5):")
for name, err in errors.items():
    print(f"  {name:>8}: {err:.3e}")

print("\nfull randomized sweep across fusion-flag settings:")
for result in run_gradcheck(seed=3, n_draws=40):
    worst = max(result.max_rel_error.values())
    print(f"  {result.flag_setting:>8}: worst {worst:.3e} "
          f"({'ok' if result.passed else 'FAIL'})")
