"""Critical-gain machinery: the scalar squeeze recursion, the coupled
per-node recursion whose summability threshold defines the dagger capacity
metric, and sweep drivers locating empirical stability transitions.

Both recursions come from inequalities; simulating them with equality is the
informative worst case. For the scalar recursion the maximizing schedule
saturates one sequence and leaves the other at zero (saturating both lets the
subtracted history grow twice as fast and moves the apparent transition to
the wrong place). For the coupled recursion both sequences saturate
literally. Summability verdicts are finite-horizon and therefore heuristic:
a tail-decile test plus a float-resolution guard (once the running sum stops
absorbing the increment, the tail is constant forever and the sum has
converged to machine precision).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .graphs import WeightedDigraph, inf_norm, sharp_metric

TAIL_TOL = 1e-9


def xie_guo_constant() -> tuple:
    """Minimize (x^2 - x/2)/(x - 1) over x > 1; returns (value, minimizer).

    The minimum is 3/2 + sqrt(2), attained at 1 + sqrt(2)/2.
    """
    def obj(x):
        return (x * x - 0.5 * x) / (x - 1.0)

    res = minimize_scalar(obj, bounds=(1.0 + 1e-9, 64.0), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.fun), float(res.x)


@dataclass
class RecursionResult:
    p: np.ndarray
    q: np.ndarray
    partial_sums: np.ndarray   # cumulative sum of p + q (per step, or per node column)
    verdict: str               # "summable" | "diverging"
    frozen: bool               # stopped because increments fell below sum resolution
    steps: int

    @property
    def r(self) -> np.ndarray:
        return np.maximum(self.p, self.q)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "steps": self.steps,
            "frozen": self.frozen,
            "final_sum": (float(self.partial_sums[-1]) if self.partial_sums.ndim == 1
                          else [float(v) for v in self.partial_sums[-1]]),
            "tail_increment": float(self.r[-1] if self.r.ndim == 1 else self.r[-1].max())
            if self.steps else 0.0,
        }


def _tail_verdict(r: np.ndarray) -> str:
    """Summable iff the last-decile increments all sit below TAIL_TOL."""
    if r.size == 0:
        return "summable"
    dec = max(1, r.shape[0] // 10)
    return "summable" if float(np.max(r[-dec:])) < TAIL_TOL else "diverging"


def simulate_scalar_recursion(M: float, omega: float = 1.0, rho: float = 1.0,
                              mode: str = "equality", T: int = 100_000,
                              seed: int = 0, cap: float = 1e12) -> RecursionResult:
    """Run p_{t+1} = (M max(peak, rho) - rho/2 - (sum of p_s + q_s)/2 + omega)^+.

    mode "equality" saturates p and keeps q at zero (the worst case);
    "seeded_slack" draws both updates uniformly below the bound. The verdict
    flips from summable to diverging as M crosses 3/2 + sqrt(2).
    """
    if M <= 0 or T < 1:
        raise ValueError("need M > 0 and T >= 1")
    if mode not in ("equality", "seeded_slack"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    p = np.zeros(T)
    q = np.zeros(T)
    S = 0.0
    peak = 0.0
    frozen = False
    verdict = None
    n_steps = T
    for t in range(T):
        bound = max(M * max(peak, rho) - 0.5 * rho - 0.5 * S + omega, 0.0)
        if mode == "equality":
            pv, qv = bound, 0.0
            if bound == 0.0:
                # argument went non-positive, so the zero suffix already in
                # the preallocated arrays is the true continuation
                verdict = "summable"
                break
            if S + bound == S:
                # increment below the sum's float resolution: converged
                p[t] = bound
                frozen = True
                verdict = "summable"
                n_steps = t + 1
                break
        else:
            pv, qv = bound * rng.random(), bound * rng.random()
        p[t], q[t] = pv, qv
        S += pv + qv
        peak = max(peak, pv, qv)
        if peak > cap:
            verdict = "diverging"
            n_steps = t + 1
            break
    p, q = p[:n_steps], q[:n_steps]
    sums = np.cumsum(p + q)
    if verdict is None:
        verdict = _tail_verdict(np.maximum(p, q))
    return RecursionResult(p, q, sums, verdict, frozen, n_steps)


def simulate_dagger_recursion(g: WeightedDigraph, M: float, omega: float,
                              T: int = 400, cap: float = 1e12) -> RecursionResult:
    """Coupled per-node recursion behind the dagger capacity metric.

    p^i_{t+1} = (M sum_j |a_ij| peak_j + omega - sum_s p^i_s)^+, with peak_j
    the running max of both sequences at node j; q is symmetric with its own
    subtracted history. Equality mode saturates both. Rows of the returned
    arrays are time steps, columns nodes.
    """
    if M <= 0 or omega <= 0:
        raise ValueError("need M > 0 and omega > 0")
    absA = np.abs(g.weights)
    n = g.n
    p = np.zeros((T, n))
    q = np.zeros((T, n))
    Sp = np.zeros(n)
    Sq = np.zeros(n)
    peak = np.zeros(n)
    frozen = False
    verdict = None
    n_steps = T
    for t in range(T):
        drive = M * (absA @ peak) + omega
        pv = np.maximum(drive - Sp, 0.0)
        qv = np.maximum(drive - Sq, 0.0)
        p[t] = pv
        q[t] = qv
        if not pv.any() and not qv.any():
            verdict = "summable"     # zero state is absorbing
            break
        if np.all(Sp + pv == Sp) and np.all(Sq + qv == Sq):
            frozen = True
            verdict = "summable"
            n_steps = t + 1
            break
        Sp += pv
        Sq += qv
        np.maximum(peak, np.maximum(pv, qv), out=peak)
        if peak.max() > cap:
            verdict = "diverging"
            n_steps = t + 1
            break
    p, q = p[:n_steps], q[:n_steps]
    sums = np.cumsum(p + q, axis=0)
    if verdict is None:
        verdict = _tail_verdict(np.maximum(p, q).max(axis=1))
    return RecursionResult(p, q, sums, verdict, frozen, n_steps)


@dataclass
class DaggerEstimate:
    estimate: float
    m_low: float
    m_high: float
    horizon: int
    omega_grid: tuple
    iterations: int
    at_bracket_high: bool
    label: str = ("heuristic finite-horizon estimate; summability tested on a "
                  "finite omega grid and cannot certify the supremum")

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "bracket": [self.m_low, self.m_high],
            "horizon": self.horizon,
            "omega_grid": list(self.omega_grid),
            "iterations": self.iterations,
            "at_bracket_high": self.at_bracket_high,
            "label": self.label,
        }


def estimate_dagger(g: WeightedDigraph, bracket: tuple | None = None,
                    T: int = 400, omega_grid=(0.1, 1.0, 10.0),
                    tol: float = 1e-3) -> DaggerEstimate:
    """Bisect the summability transition of the coupled recursion over M.

    The lower bracket edge defaults to 1/inf_norm, which is always summable,
    so the returned estimate never falls below that floor. A graph with no
    arcs decouples the recursion (summable for every M); the estimate then
    sits at the top of the bracket.
    """
    nrm = inf_norm(g)
    floor = (1.0 / nrm) if nrm > 0 else 1.0
    if bracket is None:
        bracket = (floor, 10.0 * floor)
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo >= hi:
        raise ValueError("bracket must satisfy low < high")
    if nrm > 0 and lo < floor - 1e-12:
        raise ValueError(f"bracket.low must be >= 1/inf_norm = {floor:.6g}")

    def summable(M):
        return all(simulate_dagger_recursion(g, M, w, T).verdict == "summable"
                   for w in omega_grid)

    if summable(hi):
        return DaggerEstimate(hi, hi, hi, T, tuple(omega_grid), 0, True)
    iters = 0
    while hi - lo > tol * max(1.0, floor) and iters < 60:
        mid = 0.5 * (lo + hi)
        if summable(mid):
            lo = mid
        else:
            hi = mid
        iters += 1
    return DaggerEstimate(lo, lo, hi, T, tuple(omega_grid), iters, False)


def burst_ratios(r, atol: float = 0.0) -> tuple:
    """Partial sums over the nonzero increments and their successive ratios.

    Near the critical gain the ratios settle at the minimizer of the
    objective behind xie_guo_constant.
    """
    r = np.asarray(r, dtype=float)
    vals = r[r > atol]
    R = np.cumsum(vals)
    xi = R[1:] / R[:-1] if R.size > 1 else np.empty(0)
    return R, xi


def threshold_sweep(base_config, L_values, trials: int = 1) -> dict:
    """Re-run base_config across a gain grid and tabulate the verdicts.

    For adversary-attached sweeps the constructed slope is pinned at
    4/sharp_metric, so grid points strictly below that budget cannot be
    realized and are reported as not applicable.
    """
    from .runner import run_experiment   # local import, runner uses this module

    L_values = [float(L) for L in L_values]
    points = []
    for L in L_values:
        if base_config.adversary:
            B = 4.0 / sharp_metric(base_config.graph)
            if L < B * (1.0 - 1e-12):
                points.append({"L": L, "stabilized": None, "sup_state": None,
                               "bound": None, "verdict": "not_applicable",
                               "note": f"adversary slope is 4/sharp = {B:.6g} > L"})
                continue
        sups, verdicts, bounds = [], [], []
        growth = None
        explore = None
        for trial in range(trials):
            cfg = base_config.with_gain(L, seed_offset=trial)
            result = run_experiment(cfg)
            sups.append(result.summary["sup_state"])
            verdicts.append(result.summary["verdict"])
            bounds.append(result.summary.get("bound"))
            if trial == 0:
                growth = {"R": [float(v) for v in result.interval.R],
                          "L": [float(v) for v in result.interval.L]}
                explore = result.summary.get("explore_steps")
        stab = all(v == "stabilized" for v in verdicts)
        bound = next((b for b in bounds if b is not None), None)
        points.append({"L": L, "stabilized": stab,
                       "sup_state": max(sups), "bound": bound,
                       "verdict": verdicts[0] if trials == 1 else verdicts,
                       "hull_growth": growth, "explore_steps": explore})
    stabilized_L = [pt["L"] for pt in points if pt.get("stabilized") is True]
    diverged_L = [pt["L"] for pt in points if pt.get("stabilized") is False]
    report = {
        "points": points,
        "transition": {
            "last_stabilized": max(stabilized_L) if stabilized_L else None,
            "first_not_stabilized": min(diverged_L) if diverged_L else None,
        },
        "note": "finite-horizon verdicts; the transition region is empirical",
    }
    return report
