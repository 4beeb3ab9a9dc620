"""Scenario files: TOML text with spatial/channel/flows/chain/sweep sections.

Example (all keys optional unless noted)::

    name = "fig3"
    system = "multistream"        # or "tandem"
    replications = 20
    horizon = 1e5
    root_seed = 7
    success_prob = "fixed"        # or "estimated"
    tolerance = 0.1

    [flows]
    rates = [1.0, 1.0, 1.0]
    p_success = 0.8
    mu = 4.0
    scv = 1.0
    family = "exponential"

    [chain]
    xi = 0.3
    p_a = 0.9
    K = 4
    node = { mu = 1.0, eps = 0.02, theta = 0.05, psi = 0.5 }

    [sweep]                       # required
    parameter = "flows.xi1"
    values = [0.5, 1.0, 1.5]

    [family]                      # optional; one output file per combination
    "flows.mu" = [4.0, 6.0]
"""
from __future__ import annotations

import copy
import itertools
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..analytic import ChainNode, FlowSet, SatelliteChain, ServiceSpec
from ..channel import ChannelConfig, db_to_linear
from ..errors import AoIError, ParseError, ValidationError
from ..spatial import SpatialConfig, Window

SYSTEMS = ("multistream", "tandem")
_TOP_KEYS = {
    "name", "system", "replications", "horizon", "root_seed", "success_prob", "tolerance",
    "window", "spatial", "channel", "flows", "chain", "sweep", "family",
}


@dataclass(frozen=True)
class ChannelSettings:
    config: ChannelConfig
    active_prob: float | None = None  # None: each interferer's 1/N_j
    n_samples: int = 2000
    realizations: int = 20


@dataclass(frozen=True)
class FlowSettings:
    rates: tuple
    p_success: float
    service: ServiceSpec
    target: int = 0
    model: str = "auto"  # mm11 | mg11 | auto

    def flowset(self, p=None):
        return FlowSet(self.rates, self.p_success if p is None else p, self.service)

    @property
    def analytic_model(self):
        if self.model != "auto":
            return self.model
        return "mm11" if self.service.family == "exponential" else "mg11"


@dataclass(frozen=True)
class ChainSettings:
    chain: SatelliteChain
    xi: float


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    system: str
    spatial: SpatialConfig
    window: Window
    channel: ChannelSettings
    flows: FlowSettings | None
    chain: ChainSettings | None
    sweep_parameter: str
    sweep_values: tuple
    family: dict = field(default_factory=dict)
    replications: int = 20
    horizon: float = 1e5
    root_seed: int = 0
    success_prob: str = "fixed"
    tolerance: float = 0.1
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    def family_members(self):
        """Every combination of family values as a ``{path: value}`` dict."""
        if not self.family:
            return [{}]
        keys = list(self.family)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.family[k] for k in keys))]

    def with_overrides(self, overrides):
        """Rebuild with dotted-path overrides applied to the raw mapping."""
        raw = copy.deepcopy(self.raw)
        for path, value in overrides.items():
            set_path(raw, path, value)
        return build_scenario(raw)

    def at(self, value, family=None):
        """Concrete scenario for one sweep value within one family member."""
        overrides = dict(family or {})
        overrides[self.sweep_parameter] = value
        return self.with_overrides(overrides)


def set_path(raw, path, value):
    """Assign ``value`` at dotted ``path`` inside the raw scenario mapping.

    ``flows.xi1`` is special: it sets the first flow's rate and spreads the
    rest of the (unchanged) total rate evenly over the other flows.
    """
    if path == "flows.xi1":
        rates = list(raw.get("flows", {}).get("rates", []))
        if len(rates) < 2:
            raise ValidationError("sweep.parameter", "flows.xi1 needs at least two flows")
        total = sum(rates)
        rest = (total - value) / (len(rates) - 1)
        raw["flows"]["rates"] = [value] + [rest] * (len(rates) - 1)
        return
    parts = path.split(".")
    node = raw
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ValidationError(path, "path does not name a table")
    node[parts[-1]] = value


def _section(raw, name):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ValidationError(name, "must be a table")
    return sec


def _build(kind, fieldname, **kwargs):
    try:
        return kind(**kwargs)
    except TypeError as exc:
        raise ValidationError(fieldname, str(exc)) from None


def _number(sec, key, default, section):
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{section}.{key}", f"expected a number, got {v!r}")
    return float(v)


def _parse_core(raw):
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown top-level key")
    system = raw.get("system", "multistream")
    if system not in SYSTEMS:
        raise ValidationError("system", f"must be one of {SYSTEMS}")

    sp = _section(raw, "spatial")
    spatial = _build(SpatialConfig, "spatial", **sp)
    win = _section(raw, "window")
    window = Window.square(_number(win, "side", 200.0, "window"))

    ch = dict(_section(raw, "channel"))
    theta = db_to_linear(_number(ch, "theta_db", 0.0, "channel"))
    active = ch.get("active_prob", "scheduling")
    if active != "scheduling":
        active = _number(ch, "active_prob", 0.0, "channel")
        if not 0 <= active <= 1:
            raise ValidationError("channel.active_prob", "must lie in [0, 1] or be 'scheduling'")
    channel = ChannelSettings(
        ChannelConfig(
            alpha=_number(ch, "alpha", 4.0, "channel"),
            noise=_number(ch, "noise", 1e-8, "channel"),
            theta=theta,
        ),
        None if active == "scheduling" else active,
        int(ch.get("n_samples", 2000)),
        int(ch.get("realizations", 20)),
    )
    if channel.n_samples < 1 or channel.realizations < 1:
        raise ValidationError("channel.n_samples", "sample counts must be >= 1")

    success_prob = raw.get("success_prob", "fixed")
    if success_prob not in ("fixed", "estimated"):
        raise ValidationError("success_prob", "must be 'fixed' or 'estimated'")

    flows = chain = None
    if system == "multistream" or "flows" in raw:
        fl = _section(raw, "flows")
        service = ServiceSpec(
            rate=_number(fl, "mu", 4.0, "flows"),
            scv=_number(fl, "scv", 1.0, "flows"),
            family=fl.get("family", "gamma"),
        )
        rates = tuple(fl.get("rates", (1.0, 1.0, 1.0)))
        p = _number(fl, "p_success", 0.8, "flows")
        flows = FlowSettings(rates, p, service, int(fl.get("target", 0)), fl.get("model", "auto"))
        flows.flowset()  # validate
        if not 0 <= flows.target < len(rates):
            raise ValidationError("flows.target", "no such flow")
        if flows.model not in ("auto", "mm11", "mg11"):
            raise ValidationError("flows.model", "must be auto, mm11 or mg11")
    if system == "tandem" or "chain" in raw:
        cs = _section(raw, "chain")
        if "nodes" in cs:
            nodes = [_build(ChainNode, "chain.nodes", **nd) for nd in cs["nodes"]]
        else:
            k = int(cs.get("K", 1))
            if k < 1:
                raise ValidationError("chain.K", "must be >= 1")
            nodes = [_build(ChainNode, "chain.node", **cs.get("node", {"mu": 1.0}))] * k
        chain = ChainSettings(
            SatelliteChain(nodes, _number(cs, "p_a", 1.0, "chain")),
            _number(cs, "xi", 0.3, "chain"),
        )
        if not chain.xi > 0:
            raise ValidationError("chain.xi", "must be > 0")

    return system, spatial, window, channel, success_prob, flows, chain


def build_scenario(raw: dict) -> ScenarioConfig:
    system, spatial, window, channel, success_prob, flows, chain = _parse_core(raw)
    sw = _section(raw, "sweep")
    if "parameter" not in sw or not sw.get("values"):
        raise ValidationError("sweep", "needs 'parameter' and a non-empty 'values' list")
    fam = _section(raw, "family")
    for k, v in fam.items():
        if not isinstance(v, list) or not v:
            raise ValidationError(f"family.{k}", "must be a non-empty list")

    replications = int(raw.get("replications", 20))
    horizon = _number(raw, "horizon", 1e5, "scenario")
    if replications < 1:
        raise ValidationError("replications", "must be >= 1")
    if not horizon > 0:
        raise ValidationError("horizon", "must be > 0")
    tolerance = _number(raw, "tolerance", 0.1, "scenario")

    cfg = ScenarioConfig(
        name=str(raw.get("name", "scenario")),
        system=system,
        spatial=spatial,
        window=window,
        channel=channel,
        flows=flows,
        chain=chain,
        sweep_parameter=str(sw["parameter"]),
        sweep_values=tuple(sw["values"]),
        family={k: list(v) for k, v in fam.items()},
        replications=replications,
        horizon=horizon,
        root_seed=int(raw.get("root_seed", 0)),
        success_prob=success_prob,
        tolerance=tolerance,
        raw=copy.deepcopy(raw),
    )
    # every sweep point must itself be a valid scenario
    for member in cfg.family_members():
        for v in cfg.sweep_values:
            point = copy.deepcopy(raw)
            for path, val in {**member, cfg.sweep_parameter: v}.items():
                set_path(point, path, val)
            _parse_core(point)
    return cfg


def shipped_scenarios():
    root = resources.files("aoi_ntn") / "scenarios"
    return sorted(p.name.removesuffix(".scenario") for p in root.iterdir() if p.name.endswith(".scenario"))


def resolve_scenario_path(path):
    """Accept a file path or the bare name of a shipped scenario (``fig3``)."""
    p = Path(path)
    if p.exists():
        return p
    shipped = resources.files("aoi_ntn") / "scenarios" / f"{p.stem}.scenario"
    if not p.suffix or p.suffix == ".scenario":
        if shipped.is_file():
            return Path(str(shipped))
    return p


def load_scenario(path) -> ScenarioConfig:
    p = resolve_scenario_path(path)
    try:
        text = Path(p).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        return build_scenario(raw)
    except ValidationError:
        raise
    except (AoIError, TypeError, ValueError) as exc:
        raise ValidationError("scenario", str(exc)) from None
