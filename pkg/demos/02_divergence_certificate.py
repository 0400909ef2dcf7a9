"""
Driving any controller to divergence with an online plant construction
======================================================================

When the plant's growth budget exceeds 4 / (smallest arc weight), no causal
feedback can win. The adversary commits plant values only where trajectories
have already visited, stays inside the budget, and still forces the reachable
interval to at least double every step. The certificate below is checkable
after the fact from the committed pins alone.
"""

import numpy as np

from netfeedback import ExperimentConfig, run_experiment

for kind in ("zero", "network_flow", "max_enhanced"):
    cfg = ExperimentConfig({
        "graph": {"kind": "cycle", "n": 3},
        "controller": {"kind": kind, "epsilon": 1e-3},
        "observation": {"mode": "direct", "d0": 0.0},
        "disturbance": {"w_star": 0.0, "generator": "zero"},
        "adversary": True,
        "horizon": 12,
        "x0": [0.0, 0.5, 1.0],
    })
    res = run_experiment(cfg)
    cert = res.certificate
    E = np.asarray(cert.E)
    print(f"--- controller: {kind}")
    print("verdict:    ", res.summary["verdict"])
    print("growth chi: ", np.array2string(np.asarray(cert.chi), precision=3))
    print("interval E: ", np.array2string(E, precision=3))
    print("E doubles:  ", bool(np.all(E[1:] > 2.0 * E[:-1])))
    print("sup |x|:    ", f"{np.abs(res.x_hist).max():.3e}")
    print()

# which side of the visited hull the adversary pushed at each step
print("push sides of the last run:", "".join(res.branches))
print("certificate verdict:", res.certificate.to_dict()["verdict"])
