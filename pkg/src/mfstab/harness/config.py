"""Plain-text experiment configuration.

One ``key = value`` per line, ``#`` starts a comment, lists are
comma-separated. Unknown keys are errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..bounds import BoundConstants
from ..errors import InvalidArgument, ParseError
from ..factor import SolverConfig
from ..matcore import ProblemShape

SCENARIOS = ("figure1", "figure2", "bounds", "oracle", "sigma-min", "complete")

# per-scenario defaults applied before the config file
_SCENARIO_DEFAULTS = {
    "figure1": dict(m=1000, n=1000, r=10, noise_sigma=0.1, box_mode="clip-final"),
    "figure2": dict(m=1000, n=1000, r=10, noise_sigma=0.1, box_mode="clip-final"),
    "bounds": dict(m=100, n=120, r=4, sampling_rate=0.35, noise_sigma=0.1),
    "oracle": dict(m=200, n=200, r=5, sampling_rate=0.3, noise_sigma=0.1),
    "sigma-min": dict(m=2000, n=2000, r=10, sampling_rate=0.3,
                      sampling_rates=(0.1, 0.3, 0.5), C_prop2=3.0, seeds=tuple(range(40))),
    # spectral start: a random start can land on the wrong sign pattern on tiny inputs
    "complete": dict(init="svd-of-zero-filled"),
}
_DESK = dict(m=300, n=300, r=5, attacker_counts=(0, 25, 50, 100, 200))

_SOLVER_KEYS = {f.name for f in fields(SolverConfig)}
_CONST_KEYS = {f.name for f in fields(BoundConstants)} - {"log_base"}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "figure1"
    m: int = 300
    n: int = 300
    r: int = 5
    sampling_rate: float = 0.2
    sampling_rates: tuple = ()
    k: float = 1.0
    noise_sigma: float = 0.0
    gt_scale: float = 1.0
    normalize_to_k: bool = True
    attacker_counts: tuple = (0, 25, 50, 100, 200, 400)
    n_push: int = 2
    n_nuke: int = 2
    seeds: tuple = (0, 1, 2, 3, 4)
    mu: float = 0.0
    bound_trials: int = 100
    users_per_seed: int = 20
    solver: SolverConfig = field(default_factory=SolverConfig)
    constants: BoundConstants = field(default_factory=BoundConstants)
    output_dir: str = "results"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidArgument(f"unknown scenario {self.scenario!r}")
        if not 0 < self.sampling_rate <= 1:
            raise InvalidArgument("sampling_rate must lie in (0, 1]")
        if any(not 0 < p <= 1 for p in self.sampling_rates):
            raise InvalidArgument("sampling_rates must lie in (0, 1]")
        if not self.seeds:
            raise InvalidArgument("seeds must be non-empty")
        if self.r < 1 or self.m < 1 or self.n < 1:
            raise InvalidArgument("m, n, r must be positive")
        if not self.k > 0:
            raise InvalidArgument("k must be positive")

    @property
    def shape(self) -> ProblemShape:
        return ProblemShape(self.m, self.n, self.r, self.sampling_rate)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return _build(self.scenario, kw, base=self)


def _parse_value(key, raw):
    raw = raw.strip()
    list_keys = {"attacker_counts", "seeds", "sampling_rates"}
    if key in list_keys:
        items = [s.strip() for s in raw.split(",") if s.strip()]
        conv = float if key == "sampling_rates" else int
        return tuple(conv(s) for s in items)
    if key in ("scenario", "init", "box_mode", "output_dir"):
        return raw
    if key == "normalize_to_k":
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if key in ("m", "n", "r", "n_push", "n_nuke", "bound_trials", "users_per_seed",
               "max_iterations"):
        return int(raw)
    return float(raw)


_KNOWN = ({f.name for f in fields(ExperimentConfig)} - {"solver", "constants"}) \
    | _SOLVER_KEYS | _CONST_KEYS


def parse_config(text: str) -> dict:
    """Parse config text into a flat ``{key: value}`` dict."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN:
            raise ParseError(f"unknown key {key!r}", line=lineno)
        try:
            out[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ParseError(f"{key}: {exc}", line=lineno) from None
    return out


def _build(scenario, flat, base=None, desk=False):
    base = base or ExperimentConfig(scenario=scenario)
    solver = {f.name: getattr(base.solver, f.name) for f in fields(SolverConfig)}
    consts = {f.name: getattr(base.constants, f.name) for f in fields(BoundConstants)}
    top = {}
    for key, val in flat.items():
        if key in _SOLVER_KEYS:
            solver[key] = val
        elif key in _CONST_KEYS:
            consts[key] = val
        else:
            top[key] = val
    return replace(base, solver=SolverConfig(**solver),
                   constants=BoundConstants(**consts), **top)


def make_config(scenario, flat=None, desk=False) -> ExperimentConfig:
    """Defaults for ``scenario``, then the desk preset, then ``flat`` overrides."""
    flat = dict(flat or {})
    declared = flat.pop("scenario", scenario)
    if declared != scenario:
        raise ParseError(f"config declares scenario {declared!r}, expected {scenario!r}")
    if scenario not in SCENARIOS:
        raise InvalidArgument(f"unknown scenario {scenario!r}")
    merged = dict(_SCENARIO_DEFAULTS[scenario])
    if desk and scenario in ("figure1", "figure2"):
        merged.update(_DESK)
    merged.update(flat)
    return _build(scenario, merged, base=ExperimentConfig(scenario=scenario))


def load_config(path, scenario, desk=False) -> ExperimentConfig:
    return make_config(scenario, parse_config(Path(path).read_text()), desk=desk)
