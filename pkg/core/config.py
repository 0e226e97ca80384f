"""Run configuration: YAML files, flag overrides and .env defaults."""

import itertools
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigError, HypothesisError
from .gseries import (
    DEFAULT_TOLERANCES,
    DERIVATIVE_IDENTITIES,
    Identity,
    IdentityPoint,
    Route,
    VerificationSettings,
)
from .lfun import Scenario, get_scenario
from .riesz import admissible_gamma


logger = logging.getLogger(__name__)

# Load .env file from the current directory or project root
_env_paths = [
    Path.cwd() / ".env",
    Path(__file__).parent.parent / ".env",
]
for _env_path in _env_paths:
    if _env_path.exists():
        load_dotenv(_env_path)
        break

SECTIONS = {"run", "tolerances", "truncation", "output", "grid"}
RUN_KEYS = {"scenario", "identity", "u", "v", "k", "x", "gamma", "right", "l", "threads"}
TRUNCATION_KEYS = {"n_max", "T", "nodes_per_unit", "h", "sum_tol", "quad_tol", "series_tol", "route"}
GRID_KEYS = {"u", "v", "k", "x"}
OUTPUT_FORMATS = ("json", "text", "csv")
MAX_GRID_RUNS = 10_000


def parse_complex(value: Any) -> complex:
    """Parse "1.2", "1.2+0.5i", "1.2-3j", a number, or a {re, im} mapping."""
    if isinstance(value, bool):
        raise ConfigError(f"not a complex number: {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, dict):
        try:
            return complex(float(value["re"]), float(value.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"complex mapping needs numeric 're' (and 'im'): {value!r}") from e
    if isinstance(value, str):
        text = value.strip().replace(" ", "").lower()
        if text.endswith("i"):
            text = text[:-1] + "j"
        try:
            return complex(text)
        except ValueError:
            pass
    raise ConfigError(f"not a complex number: {value!r}")


def env_log_level() -> str:
    return os.environ.get("HECKE_LOG_LEVEL", "WARNING").upper()


@dataclass
class RunConfig:
    """A verification run: scenario, identity, parameters and output."""
    scenario: str = "zeta"
    l: Optional[int] = None                 # sigma_l only
    identity: str = "all"
    u: Optional[complex] = None             # None: scenario default
    v: Optional[complex] = None
    k: Optional[int] = None
    x: Optional[float] = None               # None: scenario x values (1 for derivatives)
    gamma: Optional[float] = None
    right: Optional[float] = None
    threads: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    output_path: Optional[Path] = None
    output_format: str = "text"
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("u", "v"):
            if getattr(self, name) is not None:
                setattr(self, name, parse_complex(getattr(self, name)))
        if self.identity != "all":
            try:
                Identity(self.identity)
            except ValueError as e:
                choices = ", ".join(i.value for i in Identity)
                raise ConfigError(f"unknown identity {self.identity!r}; choose all, {choices}") from e
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.x is not None and not float(self.x) > 0:
            raise ConfigError(f"x must be positive, got {self.x}")
        unknown = set(self.truncation) - TRUNCATION_KEYS
        if unknown:
            raise ConfigError(f"unknown truncation keys: {', '.join(sorted(unknown))}")
        for key in self.tolerances:
            if key not in {i.value for i in Identity}:
                raise ConfigError(f"unknown tolerance key {key!r}")

    def with_overrides(self, **flags) -> "RunConfig":
        """Copy with every non-None flag applied."""
        changes = {k: v for k, v in flags.items() if v is not None}
        if "output_path" in changes:
            changes["output_path"] = Path(changes["output_path"])
        return replace(self, **changes)

    def with_tol_override(self, item: str) -> "RunConfig":
        """Apply one KEY=VAL override to a tolerance or truncation setting."""
        if "=" not in item:
            raise ConfigError(f"override must look like KEY=VAL, got {item!r}")
        key, raw = (s.strip() for s in item.split("=", 1))
        if key in {i.value for i in Identity}:
            return replace(self, tolerances={**self.tolerances, key: _number(key, raw)})
        if key in TRUNCATION_KEYS:
            value = raw if key == "route" else _number(key, raw)
            return replace(self, truncation={**self.truncation, key: value})
        raise ConfigError(f"unknown override key {key!r}")

    def get_scenario(self) -> Scenario:
        return get_scenario(self.scenario, self.l)

    def identities(self) -> list[Identity]:
        if self.identity == "all":
            return list(Identity)
        return [Identity(self.identity)]

    def points(self, scenario: Scenario, which: Identity,
               u=None, v=None, k=None, x=None) -> list[IdentityPoint]:
        """Identity points with scenario defaults filling unset values.

        When u, v or k move away from the scenario's parameter set and gamma
        is unset, gamma is derived from (u, v, k) and right from its range.
        """
        x = x if x is not None else self.x
        xs = [1.0] if which in DERIVATIVE_IDENTITIES else ([x] if x is not None else list(scenario.x_values))
        base = IdentityPoint.default(scenario, which)
        u = parse_complex(u if u is not None else self.u if self.u is not None else base.u)
        v = parse_complex(v if v is not None else self.v if self.v is not None else base.v)
        k = int(k if k is not None else self.k if self.k is not None else base.k)
        moved = (u, v, k) != (complex(base.u), complex(base.v), base.k)
        if self.gamma is not None:
            gamma = float(self.gamma)
        elif moved:
            try:
                gamma = admissible_gamma(scenario.phi, scenario.psi, u, v, k)
                logger.info("gamma = %g derived for (u, v, k) = (%s, %s, %d)", gamma, u, v, k)
            except HypothesisError:
                # no gamma works; the hypothesis gate names the inequality
                gamma = float(base.gamma)
        else:
            gamma = float(base.gamma)
        right = self.right if self.right is not None else (None if moved else base.right)
        return [
            replace(base, u=u, v=v, k=k, gamma=gamma, right=right,
                    h=self.truncation.get("h", base.h), x=float(xv))
            for xv in xs
        ]

    def settings(self) -> VerificationSettings:
        t = self.truncation
        tolerances = {**DEFAULT_TOLERANCES, **{Identity(k): float(v) for k, v in self.tolerances.items()}}
        base = VerificationSettings()
        try:
            route = Route(t.get("route", base.route))
        except ValueError as e:
            raise ConfigError(f"unknown route {t.get('route')!r}") from e
        return VerificationSettings(
            tolerances=tolerances,
            sum_tol=float(t.get("sum_tol", base.sum_tol)),
            quad_tol=float(t["quad_tol"]) if "quad_tol" in t else None,
            series_tol=float(t.get("series_tol", base.series_tol)),
            n_max=int(t.get("n_max", base.n_max)),
            perron_T=t.get("T"),
            perron_nodes=int(t["nodes_per_unit"]) if "nodes_per_unit" in t else None,
            h=t.get("h"),
            route=route,
            threads=self.threads,
        )

    def grid_runs(self) -> list[dict]:
        """Cartesian product of the grid lists; empty when no grid is given."""
        if not self.grid:
            return []
        unknown = set(self.grid) - GRID_KEYS
        if unknown:
            raise ConfigError(f"unknown grid keys: {', '.join(sorted(unknown))}")
        keys = sorted(self.grid)
        lists = [self.grid[k] if isinstance(self.grid[k], list) else [self.grid[k]] for k in keys]
        total = 1
        for values in lists:
            total *= len(values)
        if total > MAX_GRID_RUNS:
            raise ConfigError(f"grid has {total} runs; the limit is {MAX_GRID_RUNS}")
        return [dict(zip(keys, combo)) for combo in itertools.product(*lists)]

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "output_path"}


def _number(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as e:
        raise ConfigError(f"{key} must be numeric, got {raw!r}") from e
    return int(value) if key in ("n_max", "nodes_per_unit") else value


def load_config(path) -> RunConfig:
    """Read a YAML run-config file.

    Raises:
        ConfigError: unreadable file, unknown section or key, or bad value.
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping of sections")
    unknown = set(data) - SECTIONS
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    run = data.get("run") or {}
    bad = set(run) - RUN_KEYS
    if bad:
        raise ConfigError(f"unknown run keys: {', '.join(sorted(bad))}")
    output = data.get("output") or {}
    logger.info("Loaded run config %s", path)
    return RunConfig(
        scenario=str(run.get("scenario", "zeta")),
        l=run.get("l"),
        identity=str(run.get("identity", "all")),
        u=run.get("u"),
        v=run.get("v"),
        k=run.get("k"),
        x=run.get("x"),
        gamma=run.get("gamma"),
        right=run.get("right"),
        threads=run.get("threads"),
        tolerances=dict(data.get("tolerances") or {}),
        truncation=dict(data.get("truncation") or {}),
        output_path=Path(output["path"]) if output.get("path") else None,
        output_format=str(output.get("format", "text")),
        grid=dict(data.get("grid") or {}),
    )
