"""Experiment configuration: one JSON document per run.

Every random choice is driven by a named seed in the config, so identical
config bytes give identical outputs. Node indices in configs and outputs are
1-based; everything internal is 0-based.
"""

import copy
import json

import numpy as np

from .controllers import ControllerSpec
from .dynamics import DisturbanceSpec, ObservationSpec
from .functions import (BoundedPerturbedLinear, LinearFunction, PlantFunction,
                        TabulatedFunction)
from .graphs import (WeightedDigraph, build_canonical, is_strongly_connected,
                     random_strongly_connected, sharp_metric, sign_pattern)


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _require(d: dict, field: str, ctx: str):
    if field not in d:
        raise ConfigError(f"{ctx}.{field}" if ctx else field, "missing required field")
    return d[field]


def _build_graph(spec: dict) -> WeightedDigraph:
    kind = _require(spec, "kind", "graph")
    params = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "random_strongly_connected":
            n = params.pop("n")
            seed = params.pop("seed")
            if "weight_range" in params:
                params["weight_range"] = tuple(params["weight_range"])
            return random_strongly_connected(n, seed, **params)
        if kind == "custom":
            return WeightedDigraph(np.asarray(params["weights"], dtype=float))
        return build_canonical(kind, **params)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("graph", str(exc)) from exc


def _build_function(spec: dict) -> PlantFunction:
    kind = _require(spec, "kind", "function")
    try:
        if kind == "linear":
            return LinearFunction(spec.get("a", 1.0), spec.get("b", 0.0))
        if kind == "bounded_perturbed_linear":
            return BoundedPerturbedLinear(spec.get("a", 1.0), spec.get("b", 0.0),
                                          spec.get("amplitude", 1.0))
        if kind == "tabulated":
            return TabulatedFunction(spec["xs"], spec["ys"])
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("function", str(exc)) from exc
    raise ConfigError("function.kind", f"unknown kind {kind!r}")


class ExperimentConfig:
    """Validated cross-field view of one experiment JSON document."""

    def __init__(self, raw: dict):
        self.raw = copy.deepcopy(raw)
        self.label = raw.get("label", "")

        self.graph = _build_graph(_require(raw, "graph", ""))
        n = self.graph.n

        self.adversary = bool(raw.get("adversary", False))
        if self.adversary:
            self.f = _build_function(raw["function"]) if "function" in raw else None
            if sharp_metric(self.graph) <= 0:
                raise ConfigError("adversary", "graph has no arcs (sharp metric is 0)")
            if sign_pattern(self.graph) == "mixed":
                raise ConfigError("adversary", "graph weights must carry a uniform sign")
            if not is_strongly_connected(self.graph):
                raise ConfigError("adversary", "graph must be strongly connected")
        else:
            self.f = _build_function(_require(raw, "function", ""))

        try:
            d = raw.get("disturbance", {})
            self.disturbance = DisturbanceSpec(
                w_star=d.get("w_star", 0.0), generator=d.get("generator", "zero"),
                seed=d.get("seed", 0), sign=d.get("sign", 1))
        except ValueError as exc:
            raise ConfigError("disturbance", str(exc)) from exc

        try:
            o = raw.get("observation", {})
            self.observation = ObservationSpec(
                mode=o.get("mode", "direct"), d0=o.get("d0", 0.0),
                noise_seed=o.get("noise_seed", 0))
        except ValueError as exc:
            raise ConfigError("observation", str(exc)) from exc

        try:
            c = raw.get("controller", {"kind": "zero"})
            self.controller = ControllerSpec(kind=c.get("kind", "zero"),
                                             epsilon=c.get("epsilon", 1e-3))
        except ValueError as exc:
            raise ConfigError("controller", str(exc)) from exc

        if self.controller.kind == "cycle_global" and \
                raw.get("graph", {}).get("kind") != "cycle":
            raise ConfigError("controller", "cycle_global requires a cycle graph")
        if self.controller.kind == "path_root" and \
                raw.get("graph", {}).get("kind") != "path_root_selfloop":
            raise ConfigError("controller",
                              "path_root requires a path_root_selfloop graph")

        self.horizon = raw.get("horizon", 100)
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ConfigError("horizon", "must be an integer >= 1")

        x0 = _require(raw, "x0", "")
        if isinstance(x0, dict):
            seed = _require(x0, "seed", "x0")
            scale = x0.get("scale", 1.0)
            rng = np.random.default_rng(seed)
            self.x0 = rng.uniform(-scale, scale, n)
        else:
            self.x0 = np.asarray(x0, dtype=float)
            if self.x0.shape != (n,):
                raise ConfigError("x0", f"needs {n} entries, got {self.x0.shape}")
            if not np.all(np.isfinite(self.x0)):
                raise ConfigError("x0", "entries must be finite")

        cap = raw.get("guard_cap")
        if cap is not None and (not np.isfinite(cap) or cap <= 0):
            raise ConfigError("guard_cap", "must be a positive finite number")
        # adversary runs need room to record the full doubling horizon
        self.guard_cap = float(cap) if cap is not None else \
            (1e300 if self.adversary else 1e12)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        return cls(raw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("<file>", "top level must be a JSON object")
        return cls(raw)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    def with_gain(self, L: float, seed_offset: int = 0) -> "ExperimentConfig":
        """Copy of this config with the function slope set to L; for sweeps
        with trials > 1 the seeds shift so trials differ."""
        raw = copy.deepcopy(self.raw)
        fn = raw.get("function")
        if fn is not None:
            if fn.get("kind") not in ("linear", "bounded_perturbed_linear"):
                raise ConfigError("function", "gain sweep needs a parametric slope")
            fn["a"] = float(L)
        elif not self.adversary:
            raise ConfigError("function", "gain sweep needs a function spec")
        if seed_offset:
            d = raw.setdefault("disturbance", {})
            d["seed"] = d.get("seed", 0) + seed_offset
            o = raw.setdefault("observation", {})
            o["noise_seed"] = o.get("noise_seed", 0) + seed_offset
            if isinstance(raw.get("x0"), dict):
                raw["x0"]["seed"] = raw["x0"].get("seed", 0) + seed_offset
        return ExperimentConfig(raw)
