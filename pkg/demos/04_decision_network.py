"""The recurrent decision network: forward scores, exact BPTT, gradient checking.

States are sorted tuples of selected feature indices; token 0 is the
begin-of-sequence marker so the empty state is a valid input. The backward
pass is exact, which a central-finite-difference probe confirms here.
"""

import numpy as np

from rlselect import NetworkConfig, OptimizerState, backward, forward, init, step

cfg = NetworkConfig.for_features(8, embed_dim=4, hidden_dim=12, cell="lstm")
params = init(cfg, seed=0)

print(f"scores at the empty state: {np.round(forward(params, ()), 3)}")
print(f"scores after selecting {{2, 5}}: {np.round(forward(params, (2, 5)), 3)}")

# sortedness is the state contract: (5, 2) is not a state
try:
    forward(params, (5, 2))
except ValueError as exc:
    print(f"unsorted state rejected: {exc}")

# spot-check one gradient entry against central differences
state, action, target = (1, 4), 3, 0.9
grads = backward(params, state, action, target)
name, idx = "w_h", (0, 0)
h = 1e-5
orig = params.tensors[name][idx]
params.tensors[name][idx] = orig + h
up = 0.5 * (forward(params, state)[action - 1] - target) ** 2
params.tensors[name][idx] = orig - h
down = 0.5 * (forward(params, state)[action - 1] - target) ** 2
params.tensors[name][idx] = orig
fd = (up - down) / (2 * h)
print(f"d loss / d {name}{idx}: backprop {grads[name][idx]:+.8f}  finite-diff {fd:+.8f}")

# a few SGD steps pull Q(state)[action] toward the target
opt = OptimizerState(total_steps=1000, base_rate=0.5)
for i in range(60):
    step(params, backward(params, state, action, target), opt)
print(f"Q after 60 steps: {forward(params, state)[action - 1]:.4f} (target {target})")
