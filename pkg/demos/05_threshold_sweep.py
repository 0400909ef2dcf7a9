"""
Sweeping the plant gain across the critical constant
====================================================

The same closed-loop experiment re-run over a grid of growth gains. Below
roughly 2.914 the residual band is achievable; past it no causal law helps,
which the adversary-attached sweep makes concrete.
"""

from netfeedback import ExperimentConfig, threshold_sweep, xie_guo_constant

base = ExperimentConfig({
    "graph": {"kind": "custom", "weights": [[1.0]]},
    "function": {"kind": "linear", "a": 0.5, "b": 0.0},
    "controller": {"kind": "network_flow", "epsilon": 2e-4},
    "observation": {"mode": "direct", "d0": 0.01, "noise_seed": 2},
    "disturbance": {"w_star": 0.02, "generator": "seeded_uniform", "seed": 5},
    "horizon": 6000,
    "x0": [0.05],
})

# 1. closed-loop sweep: every gain below the constant stabilizes here
grid = [0.5, 1.5, 2.5, 2.85]
report = threshold_sweep(base, grid)
print(f"critical constant = {xie_guo_constant()[0]:.6f}")
print("gain   verdict          sup |x|     band")
for p in report["points"]:
    print(f"{p['L']:<5}  {p['verdict']:<15}  {p['sup_state']:<10.4f}  "
          f"{p['bound']:.4f}")
print("transition:", report["transition"])
print()

# 2. adversary sweep: gains above the budget 4/sharp produce certified blowup
adv = ExperimentConfig(base.to_dict() | {"adversary": True, "horizon": 40})
report = threshold_sweep(adv, [2.0, 4.0, 6.0])
print("gain   verdict")
for p in report["points"]:
    print(f"{p['L']:<5}  {p['verdict']}")
print("note:", report["note"])
