"""JSON scenario files for the command-line front end."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, XYNetError
from .network import PhysicalParams, TopologySpec

MODES = ("spectrum", "transfer", "sweep", "validate", "dissipative")
FORMATS = ("csv", "json")

DEFAULT_F = 5.0
DEFAULT_TAU_MAX = 60.0
DEFAULT_TAU_STEPS = 6000

TOP_KEYS = {
    "mode", "topology", "physical", "N", "f", "tau_max", "tau_steps", "receiver",
    "fidelity_mode", "lamb_compensation", "initial", "ratios", "rates", "rate_times",
    "step", "output", "format", "jobs", "slow_window", "points_per_period",
}
TOPOLOGY_KEYS = {"variant", "x", "f", "J", "J_file"}
PHYSICAL_KEYS = {"omega_a", "E_q", "delta", "Omega"}
RATE_KEYS = {"kappa", "gamma_relax", "gamma_phi"}
RATE_TIME_KEYS = {"coupling", "T1", "T_phi", "kappa"}


@dataclass(frozen=True)
class Run:
    N: int
    f: float | None


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str
    topology: TopologySpec | None
    physical: PhysicalParams | None
    N: tuple
    f: tuple
    tau_max: float = DEFAULT_TAU_MAX
    tau_steps: int = DEFAULT_TAU_STEPS
    receiver: int | None = None
    fidelity_mode: str = "raw"
    lamb_compensation: bool = False
    initial: str = "dressed"
    ratios: tuple = (0.1, 0.05)
    rates: dict = field(default_factory=dict)
    step: float | None = None
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    slow_window: tuple | None = None
    points_per_period: int = 20
    digest: str = ""

    def runs(self) -> list[Run]:
        """Scenario points in declaration order (N outer, f inner)."""
        if self.physical is not None:
            return [Run(self.physical.N, None)]
        fs = self.f if self.topology.variant in ("engineered", "weak_link") else (None,)
        return [Run(n, f) for n in self.N for f in fs]

    def topology_for(self, run: Run) -> TopologySpec:
        t = self.topology
        if run.f is None:
            return t
        return TopologySpec(t.variant, x=t.x, f=run.f, J=t.J)

    def tau_grid(self, steps: int | None = None) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, steps or self.tau_steps)


def config_digest(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _reject_unknown(obj: dict, allowed: set, path: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError("unknown key", f"{path}.{key}" if path else key)


def _number(value, path, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer and not float(value).is_integer():
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if positive and not value > 0:
        raise ConfigError(f"must be positive, got {value!r}", path)
    return int(value) if integer else float(value)


def _list_of(value, path, **kw):
    items = value if isinstance(value, list) else [value]
    if not items:
        raise ConfigError("must not be empty", path)
    return tuple(_number(v, f"{path}[{k}]", **kw) for k, v in enumerate(items))


def _matrix(value, path):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"not a numeric matrix ({exc})", path) from None
    if arr.ndim != 2:
        raise ConfigError("must be a 2-D matrix", path)
    return arr


def parse_config(text: str, mode: str | None = None, base_dir: str | Path | None = None) -> ScenarioConfig:
    """Validate a JSON scenario and fill in defaults.

    ``mode`` (from the subcommand) fills a missing ``"mode"`` key and must
    agree with it when present. Relative file references resolve against
    ``base_dir``.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    _reject_unknown(raw, TOP_KEYS, "")
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    cfg_mode = raw.get("mode", mode)
    if cfg_mode is None:
        raise ConfigError("missing", "mode")
    if cfg_mode not in MODES:
        raise ConfigError(f"must be one of {MODES}, got {cfg_mode!r}", "mode")
    if mode is not None and cfg_mode != mode:
        raise ConfigError(f"config says {cfg_mode!r} but subcommand is {mode!r}", "mode")

    has_topo, has_phys = "topology" in raw, "physical" in raw
    if has_topo == has_phys:
        raise ConfigError("exactly one of 'topology' and 'physical' must be given", "topology")

    topology = physical = None
    N: tuple = ()
    fs: tuple = ()
    try:
        if has_topo:
            topo = raw["topology"]
            if not isinstance(topo, dict):
                raise ConfigError("must be an object", "topology")
            _reject_unknown(topo, TOPOLOGY_KEYS, "topology")
            variant = topo.get("variant")
            if variant not in TopologySpec.VARIANTS:
                raise ConfigError(f"must be one of {TopologySpec.VARIANTS}", "topology.variant")
            x = _number(topo.get("x", 1.0), "topology.x")
            if x == 0:
                raise ConfigError("must be nonzero", "topology.x")
            if "f" in topo and "f" in raw:
                raise ConfigError("give f either in topology or at top level", "f")
            fs = _list_of(raw.get("f", topo.get("f", DEFAULT_F)),
                          "f" if "f" in raw else "topology.f")
            if variant in ("engineered", "weak_link"):
                for k, f in enumerate(fs):
                    if not f > 1:
                        raise ConfigError(f"f must exceed 1, got {f}",
                                          "f" if "f" in raw else "topology.f")
            J = None
            if variant == "custom":
                if ("J" in topo) == ("J_file" in topo):
                    raise ConfigError("custom topology needs exactly one of J, J_file", "topology")
                if "J" in topo:
                    J = _matrix(topo["J"], "topology.J")
                else:
                    path = base / topo["J_file"]
                    if not path.is_file():
                        raise ConfigError(f"file not found: {path}", "topology.J_file")
                    J = _matrix(np.loadtxt(path, delimiter=","), "topology.J_file")
            topology = TopologySpec(variant, x=x, f=fs[0], J=J)
            if "N" not in raw:
                if J is None:
                    raise ConfigError("missing", "N")
                N = (J.shape[0],)
            else:
                N = _list_of(raw["N"], "N", integer=True)
            min_n = 3 if variant in ("engineered", "weak_link") else 2
            for k, n in enumerate(N):
                if n < min_n:
                    raise ConfigError(f"must be >= {min_n} for {variant}", f"N[{k}]")
                if J is not None and n != J.shape[0]:
                    raise ConfigError(f"does not match J of size {J.shape[0]}", f"N[{k}]")
        else:
            phys = raw["physical"]
            if not isinstance(phys, dict):
                raise ConfigError("must be an object", "physical")
            _reject_unknown(phys, PHYSICAL_KEYS, "physical")
            for key in ("omega_a", "Omega"):
                if key not in phys:
                    raise ConfigError("missing", f"physical.{key}")
            if ("E_q" in phys) == ("delta" in phys):
                raise ConfigError("give exactly one of E_q, delta", "physical")
            omega_a = _number(phys["omega_a"], "physical.omega_a")
            Omega = _list_of(phys["Omega"], "physical.Omega", positive=True)
            if "E_q" in phys:
                physical = PhysicalParams(omega_a, _list_of(phys["E_q"], "physical.E_q"), Omega)
            else:
                physical = PhysicalParams.from_detunings(
                    omega_a, _list_of(phys["delta"], "physical.delta"), Omega)
            if "N" in raw and _number(raw["N"], "N", integer=True) != physical.N:
                raise ConfigError(f"does not match {physical.N} Rabi frequencies", "N")
            N = (physical.N,)
    except XYNetError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), "topology" if has_topo else "physical") from None

    opts: dict[str, Any] = {}
    if "tau_max" in raw:
        opts["tau_max"] = _number(raw["tau_max"], "tau_max", positive=True)
    if "tau_steps" in raw:
        steps = _number(raw["tau_steps"], "tau_steps", integer=True)
        if steps < 2:
            raise ConfigError("must be >= 2", "tau_steps")
        opts["tau_steps"] = steps
    if "receiver" in raw:
        j = _number(raw["receiver"], "receiver", integer=True)
        if not all(2 <= j <= n for n in N):
            raise ConfigError(f"must lie in [2, N] for every N, got {j}", "receiver")
        opts["receiver"] = j
    if "fidelity_mode" in raw:
        if raw["fidelity_mode"] not in ("raw", "phase_optimized"):
            raise ConfigError("must be 'raw' or 'phase_optimized'", "fidelity_mode")
        opts["fidelity_mode"] = raw["fidelity_mode"]
    if "lamb_compensation" in raw:
        if not isinstance(raw["lamb_compensation"], bool):
            raise ConfigError("must be true or false", "lamb_compensation")
        opts["lamb_compensation"] = raw["lamb_compensation"]
    if "initial" in raw:
        if raw["initial"] not in ("dressed", "bare"):
            raise ConfigError("must be 'dressed' or 'bare'", "initial")
        opts["initial"] = raw["initial"]
    if "ratios" in raw:
        ratios = _list_of(raw["ratios"], "ratios", positive=True)
        if len(ratios) < 2:
            raise ConfigError("need at least two values", "ratios")
        opts["ratios"] = ratios
    if "rates" in raw and "rate_times" in raw:
        raise ConfigError("give either rates or rate_times", "rates")
    if "rates" in raw:
        rates = raw["rates"]
        if not isinstance(rates, dict):
            raise ConfigError("must be an object", "rates")
        _reject_unknown(rates, RATE_KEYS, "rates")
        opts["rates"] = {k: _number(v, f"rates.{k}") for k, v in rates.items()}
        for k, v in opts["rates"].items():
            if v < 0:
                raise ConfigError("must be >= 0", f"rates.{k}")
    if "rate_times" in raw:
        rt = raw["rate_times"]
        if not isinstance(rt, dict):
            raise ConfigError("must be an object", "rate_times")
        _reject_unknown(rt, RATE_TIME_KEYS, "rate_times")
        if "coupling" not in rt:
            raise ConfigError("missing", "rate_times.coupling")
        c = _number(rt["coupling"], "rate_times.coupling", positive=True)
        rates = {"kappa": _number(rt.get("kappa", 0.0), "rate_times.kappa") / c}
        if "T1" in rt:
            rates["gamma_relax"] = 1.0 / (c * _number(rt["T1"], "rate_times.T1", positive=True))
        if "T_phi" in rt:
            rates["gamma_phi"] = 1.0 / (c * _number(rt["T_phi"], "rate_times.T_phi", positive=True))
        opts["rates"] = rates
    if "step" in raw:
        opts["step"] = _number(raw["step"], "step", positive=True)
    if "output" in raw:
        if not isinstance(raw["output"], str):
            raise ConfigError("must be a string", "output")
        opts["output"] = raw["output"]
    if "format" in raw:
        if raw["format"] not in FORMATS:
            raise ConfigError(f"must be one of {FORMATS}", "format")
        opts["format"] = raw["format"]
    if "jobs" in raw:
        opts["jobs"] = _number(raw["jobs"], "jobs", positive=True, integer=True)
    if "slow_window" in raw:
        sw = raw["slow_window"]
        if not (isinstance(sw, list) and len(sw) == 2):
            raise ConfigError("must be [tau_min, tau_max]", "slow_window")
        opts["slow_window"] = tuple(_number(v, f"slow_window[{k}]") for k, v in enumerate(sw))
    if "points_per_period" in raw:
        opts["points_per_period"] = _number(raw["points_per_period"], "points_per_period",
                                            positive=True, integer=True)
    if cfg_mode == "validate" and physical is None and topology.variant not in ("cluster", "engineered"):
        raise ConfigError("validate needs a cluster or engineered topology, or physical parameters",
                          "topology.variant")

    return ScenarioConfig(
        mode=cfg_mode, topology=topology, physical=physical, N=N, f=fs,
        digest=config_digest(raw), **opts,
    )


def load_config(path: str | Path, mode: str | None = None) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"file not found: {path}", "--config")
    return parse_config(path.read_text(), mode=mode, base_dir=path.parent)
