"""Run configuration: INI files, command-line overrides and validation.

Config files are flat ``key = value`` INI with these sections (all optional)::

    [rules]       game = go|nogo, size, komi, superko
    [thresholds]  eta_eq, eta_correct, eta_adv
    [target]      kind = mcts|engine, simulations (comma list), robust, seed
    [examiner]    kind = mcts|oracle|engine, simulations, engine_cmd, timeout
    [attack]      kind = value|policy|both, steps = 1step|2step|both,
                  territory, hint, filter, exhaustive, workers, seed

Command-line flags override file values, which override the defaults below.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace
from pathlib import Path

from advstate.agents.agent import AgentSpec
from advstate.attack import AttackKind, AttackSettings
from advstate.game import MAX_SIZE, MIN_SIZE, Rules, go_rules, nogo_rules
from advstate.perturbation import StepMode, Thresholds


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


@dataclass(frozen=True)
class CliConfig:
    command: str = ""
    inputs: tuple[str, ...] = ()
    out: str = "out"
    rules: str = "go"
    size: int = 5
    komi: float | None = None
    superko: bool = True
    eta_eq: float = 0.1
    eta_correct: float = 0.15
    eta_adv: float = 0.5
    kind: str = "both"
    steps: str = "both"
    target_kind: str = "mcts"
    target_sims: tuple[int, ...] = (1,)
    target_robust: bool = False
    examiner_kind: str = "mcts"
    examiner_sims: int = 200
    engine_cmd: str | None = None
    engine_timeout: float = 30.0
    seed: int = 0
    workers: int = 1
    games: int = 10
    players: tuple[int, ...] | None = None
    territory: bool = True
    hint: bool = True
    filter: bool = True
    exhaustive: bool = False
    oracle: bool = False

    # -- derived objects --------------------------------------------------

    def game_rules(self) -> Rules:
        if self.rules == "nogo":
            return nogo_rules()
        return go_rules(self.size, self.komi, superko=self.superko)

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(self.eta_eq, self.eta_correct, self.eta_adv)

    def settings(self) -> AttackSettings:
        return AttackSettings(self.thresholds, use_territory=self.territory, use_hint=self.hint,
                              use_filter=self.filter, exhaustive=self.exhaustive)

    def target_specs(self) -> tuple[AgentSpec, ...]:
        return tuple(
            AgentSpec(self.target_kind, n, seed=self.seed, robust=self.target_robust,
                      engine_cmd=self.engine_cmd if self.target_kind == "engine" else None,
                      timeout=self.engine_timeout)
            for n in self.target_sims
        )

    def examiner_spec(self) -> AgentSpec:
        kind = "oracle" if self.oracle else self.examiner_kind
        return AgentSpec(kind, self.examiner_sims, seed=self.seed,
                         engine_cmd=self.engine_cmd if kind == "engine" else None, timeout=self.engine_timeout)

    def kinds(self) -> tuple[AttackKind, ...]:
        if self.kind == "both":
            return (AttackKind.VALUE, AttackKind.POLICY)
        return (AttackKind(self.kind),)

    def step_modes(self) -> tuple[StepMode, ...]:
        if self.steps == "both":
            return (StepMode.ONESTEP, StepMode.TWOSTEP)
        return (StepMode(self.steps),)

    def player_specs(self) -> tuple[AgentSpec, AgentSpec]:
        """Black and white for self-play; defaults to the first target playing itself."""
        sims = self.players or (self.target_sims[0], self.target_sims[0])
        return tuple(AgentSpec("mcts", n, seed=self.seed) for n in sims)  # type: ignore[return-value]

    # -- checks -----------------------------------------------------------

    def validate(self) -> "CliConfig":
        """Reject bad values and combinations, naming the offending field."""
        if self.rules not in ("go", "nogo"):
            raise ConfigError("rules", f"expected go or nogo, got {self.rules!r}")
        if not MIN_SIZE <= self.size <= MAX_SIZE:
            raise ConfigError("size", f"must be in [{MIN_SIZE}, {MAX_SIZE}], got {self.size}")
        if self.rules == "nogo" and self.komi not in (None, 0, 0.0):
            raise ConfigError("komi", "NoGo has no komi")
        for name in ("eta_eq", "eta_correct", "eta_adv"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ConfigError(name, f"must be in [0, 1], got {x}")
        if not self.eta_adv > self.eta_eq:
            raise ConfigError("eta_adv", f"must exceed eta_eq ({self.eta_eq}), got {self.eta_adv}")
        if self.kind not in ("value", "policy", "both"):
            raise ConfigError("kind", f"expected value, policy or both, got {self.kind!r}")
        if self.steps not in ("1step", "2step", "both"):
            raise ConfigError("steps", f"expected 1step, 2step or both, got {self.steps!r}")
        if self.target_kind not in ("mcts", "engine"):
            raise ConfigError("target_kind", f"expected mcts or engine, got {self.target_kind!r}")
        if self.examiner_kind not in ("mcts", "oracle", "engine"):
            raise ConfigError("examiner_kind", f"expected mcts, oracle or engine, got {self.examiner_kind!r}")
        if not self.target_sims or any(n < 1 for n in self.target_sims):
            raise ConfigError("target_sims", "needs one or more positive simulation counts")
        if len(set(self.target_sims)) != len(self.target_sims):
            raise ConfigError("target_sims", "contains duplicates")
        if self.examiner_sims < 1:
            raise ConfigError("examiner_sims", f"must be positive, got {self.examiner_sims}")
        if "engine" in (self.target_kind, self.examiner_kind) and not self.engine_cmd:
            raise ConfigError("engine_cmd", "an engine agent is configured but no command was given")
        if self.engine_cmd and "engine" not in (self.target_kind, self.examiner_kind):
            raise ConfigError("engine_cmd", "given but neither target nor examiner is an engine")
        if self.oracle and self.examiner_kind == "engine":
            raise ConfigError("oracle", "cannot combine with an engine examiner")
        if self.engine_timeout <= 0:
            raise ConfigError("engine_timeout", "must be positive")
        if self.workers < 1:
            raise ConfigError("workers", f"must be at least 1, got {self.workers}")
        if self.games < 1:
            raise ConfigError("games", f"must be at least 1, got {self.games}")
        if self.players is not None and (len(self.players) != 2 or min(self.players) < 1):
            raise ConfigError("players", "expects two positive simulation counts, black then white")
        if self.seed < 0:
            raise ConfigError("seed", "must be non-negative")
        return self


def _bool(field_name: str, text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(field_name, f"expected a boolean, got {text!r}")


def _int_list(field_name: str, text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(field_name, f"expected comma-separated integers, got {text!r}") from None


# (section, key) -> (field, parser)
_KEYS = {
    ("rules", "game"): ("rules", str),
    ("rules", "size"): ("size", int),
    ("rules", "komi"): ("komi", float),
    ("rules", "superko"): ("superko", _bool),
    ("thresholds", "eta_eq"): ("eta_eq", float),
    ("thresholds", "eta_correct"): ("eta_correct", float),
    ("thresholds", "eta_adv"): ("eta_adv", float),
    ("target", "kind"): ("target_kind", str),
    ("target", "simulations"): ("target_sims", _int_list),
    ("target", "robust"): ("target_robust", _bool),
    ("target", "seed"): ("seed", int),
    ("examiner", "kind"): ("examiner_kind", str),
    ("examiner", "simulations"): ("examiner_sims", int),
    ("examiner", "engine_cmd"): ("engine_cmd", str),
    ("examiner", "timeout"): ("engine_timeout", float),
    ("attack", "kind"): ("kind", str),
    ("attack", "steps"): ("steps", str),
    ("attack", "territory"): ("territory", _bool),
    ("attack", "hint"): ("hint", _bool),
    ("attack", "filter"): ("filter", _bool),
    ("attack", "exhaustive"): ("exhaustive", _bool),
    ("attack", "workers"): ("workers", int),
    ("attack", "seed"): ("seed", int),
    ("attack", "games"): ("games", int),
}


def read_config_file(path: str | Path) -> dict:
    """Parse an INI file into a dict of :class:`CliConfig` field overrides."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as f:
            cp.read_file(f)
    except configparser.Error as e:
        raise ConfigError("config", f"{path}: {e}") from None
    out = {}
    for section in cp.sections():
        for key, text in cp.items(section):
            if (section, key) not in _KEYS:
                raise ConfigError(f"{section}.{key}", "unknown setting")
            name, parse = _KEYS[(section, key)]
            try:
                out[name] = parse(name, text) if parse in (_bool, _int_list) else parse(text)
            except ValueError as e:
                if isinstance(e, ConfigError):
                    raise
                raise ConfigError(name, f"bad value {text!r}") from None
    return out


def build_config(overrides: dict, config_path: str | Path | None = None) -> CliConfig:
    """Defaults, then the config file, then ``overrides`` (None values are ignored)."""
    merged = {}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    names = {f.name for f in fields(CliConfig)}
    for k, v in overrides.items():
        if k not in names:
            raise ConfigError(k, "unknown setting")
        if v is not None:
            merged[k] = v
    return replace(CliConfig(), **merged).validate()
