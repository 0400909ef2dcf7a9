"""The uncertain network plant and its two observation channels.

One step of the plant, per node i:

    x_i(t+1) = sum_{j in N_i} a_ij f(x_j(t)) + u_i(t) + w_i(t)

with |w_i(t)| <= w_star. The estimate channel either reads f(x_i(t)) directly
with bounded error d0, or reconstructs all of f(X(t)) at once by inverting the
weight matrix on X(t+1) - U(t); the inverse route inherits an error of at most
||A^{-1}||_inf * w_star.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .graphs import WeightedDigraph


@dataclass(frozen=True)
class DisturbanceSpec:
    """Bounded per-step disturbance.

    generator:
      * "zero": W identically zero (w_star may be 0 in this case only).
      * "seeded_uniform": iid uniform on [-w_star, w_star], seeded.
      * "constant_sign": uniform magnitude in [0, w_star] times `sign`.
      * "adversary_hook": the runner supplies W externally per step.
    """

    w_star: float = 0.0
    generator: str = "zero"
    seed: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.generator not in ("zero", "seeded_uniform", "constant_sign",
                                  "adversary_hook"):
            raise ValueError(f"unknown disturbance generator {self.generator!r}")
        if self.w_star < 0:
            raise ValueError("w_star must be nonnegative")
        if self.w_star == 0.0 and self.generator not in ("zero", "adversary_hook"):
            raise ValueError("w_star must be positive for a nonzero generator")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def make_source(self) -> "DisturbanceSource":
        return DisturbanceSource(self)


class DisturbanceSource:
    """Stateful draw-per-step wrapper so runs are reproducible."""

    def __init__(self, spec: DisturbanceSpec):
        self.spec = spec
        self._rng = np.random.default_rng(spec.seed)

    def draw(self, n: int) -> np.ndarray:
        s = self.spec
        if s.generator in ("zero", "adversary_hook"):
            return np.zeros(n)
        if s.generator == "seeded_uniform":
            return self._rng.uniform(-s.w_star, s.w_star, n)
        # constant_sign
        return s.sign * self._rng.uniform(0.0, s.w_star, n)


@dataclass(frozen=True)
class ObservationSpec:
    """How z_i(t), the estimate of f(x_i(t)), is produced.

    mode "direct": z_i = f(x_i) + e_i with |e_i| <= d0 (seeded uniform).
    mode "matrix_inverse": Z = A^{-1} (X(t+1) - U(t)); needs invertible A.
    """

    mode: str = "direct"
    d0: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("direct", "matrix_inverse"):
            raise ValueError(f"unknown observation mode {self.mode!r}")
        if self.d0 < 0:
            raise ValueError("d0 must be nonnegative")


@dataclass
class PlantModel:
    graph: WeightedDigraph
    f: object  # PlantFunction
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    observation: ObservationSpec = field(default_factory=ObservationSpec)


@dataclass
class PlantState:
    t: int
    x: np.ndarray


def step(model: PlantModel, state: PlantState, u: np.ndarray,
         w: np.ndarray | None = None, source: DisturbanceSource | None = None):
    """Advance the plant one step; returns (next state, realized W).

    Overflow is not an error here: non-finite states are the runner's guard
    problem, not a crash.
    """
    x = np.asarray(state.x, dtype=float)
    u = np.asarray(u, dtype=float)
    n = model.graph.n
    if x.shape != (n,) or u.shape != (n,):
        raise ValueError(f"state/control must have shape ({n},)")
    if w is None:
        w = (source or model.disturbance.make_source()).draw(n)
    else:
        w = np.asarray(w, dtype=float)
        if w.shape != (n,):
            raise ValueError(f"disturbance must have shape ({n},)")
    with np.errstate(over="ignore", invalid="ignore"):
        x_next = model.graph.weights @ np.asarray(model.f(x), dtype=float) + u + w
    return PlantState(state.t + 1, x_next), w


def observe_direct(f, x: np.ndarray, d0: float = 0.0,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """z_i = f(x_i) + e_i with |e_i| <= d0."""
    z = np.asarray(f(np.asarray(x, dtype=float)), dtype=float)
    if d0 > 0.0:
        if rng is None:
            rng = np.random.default_rng(0)
        z = z + rng.uniform(-d0, d0, z.shape)
    return z


class InverseObserver:
    """Matrix-inverse estimate channel with a one-time conditioning check."""

    def __init__(self, graph: WeightedDigraph, cond_limit: float = 1e12):
        a = graph.weights
        cond = np.linalg.cond(a)
        if not np.isfinite(cond) or cond > cond_limit:
            raise ValueError(
                "weight matrix is singular or ill-conditioned "
                f"(cond={cond:.3e} > {cond_limit:.1e}); use the direct "
                "observation mode instead (a least-squares variant is a "
                "documented extension point, not implemented)")
        self._lu = lu_factor(a)
        self.error_gain = float(np.abs(np.linalg.inv(a)).sum(axis=1).max())

    def observe(self, x_next: np.ndarray, u: np.ndarray) -> np.ndarray:
        return lu_solve(self._lu, np.asarray(x_next, float) - np.asarray(u, float))


def observe_inverse(graph: WeightedDigraph, x_next: np.ndarray, u: np.ndarray,
                    cond_limit: float = 1e12) -> np.ndarray:
    """One-shot inverse observation; see InverseObserver for the cached form."""
    return InverseObserver(graph, cond_limit).observe(x_next, u)
