"""
Reverse-mode gradients and how they are checked
===============================================

A convolution followed by max-over-time, differentiated by hand-written
backward rules and compared with central differences.
"""

import numpy as np

from structblock import tensor as T
from structblock.gradsuite import TOLERANCE, run_gradient_suite

rng = np.random.default_rng(0)

# a 6-token sequence of 4-dim rows, 3 filters of width 2
x = T.Tensor(rng.normal(size=(6, 4)), requires_grad=True)
W = T.Tensor(rng.normal(size=(2, 4, 3)), requires_grad=True)
b = T.Tensor(np.zeros(3), requires_grad=True)

feature = T.max_over_time(T.relu(T.conv1d(x, W, b)))
print("pooled features:", feature.data)

# d(sum of features)/dW comes back through max -> relu -> conv
T.backward(T.sum_all(feature))
print("dW[0] =\n", W.grad[0])

# the same number by finite differences, for the three tensors at once
err = T.grad_check(lambda: T.sum_all(T.max_over_time(T.relu(T.conv1d(x, W, b)))), [x, W, b])
print(f"max relative error: {err:.2e}")

# every op on random shapes, plus the whole model on a miniature config
results, seconds = run_gradient_suite()
worst = max(e for _, e in results)
print(f"{len(results)} checks, worst {worst:.2e} (tolerance {TOLERANCE:g}), {seconds:.1f}s")
