"""
Run configuration with YAML, JSON, ``.env`` and environment variable support.

Sources are layered: defaults, then a config file, then ``INVOT_*``
variables (a ``.env`` file in the working directory is read first), then
explicit overrides from the command line. ``INVOT_OUT`` is applied last.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from dotenv import dotenv_values

from ..exceptions import ConfigValidationError, ParseError

COMMANDS = (
    "forward",
    "potentials",
    "recover-map",
    "recover-values",
    "recover-concave",
    "identify",
    "demo",
)
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
METHODS = ("fourier", "post")
MAX_LP_N = 1000
MAX_GRID_N = 20001
HASH_EXCLUDED = ("out", "log_level")


def normalize_keys(mapping: Dict[str, Any]) -> Dict[str, Any]:
    """Dashes in keys read as underscores; a single ``cost`` reads as ``costs``."""
    normalized = {str(k).replace("-", "_"): v for k, v in mapping.items()}
    if "cost" in normalized:
        normalized["costs"] = normalized.pop("cost")
    return normalized


@dataclass
class RunConfig:
    """Everything one pipeline run depends on."""

    command: str = "forward"

    # Inputs: shorthand strings, inline JSON documents or paths to JSON files
    costs: List[Any] = field(default_factory=list)
    mu: Optional[Any] = None
    nu: Optional[Any] = None
    family: str = "normal"
    surface: Optional[str] = None
    observations: Optional[str] = None
    alpha: Optional[float] = None
    demo: Optional[str] = None

    # Numerical knobs
    method: str = "fourier"
    grid_n: int = 1001
    lp_n: int = 100
    reg_eps: float = 1e-3
    post_order: int = 10
    poly_degree: Optional[int] = 2
    tol: float = 1e-8
    jobs: int = 1
    seed: int = 0

    log_level: str = "WARNING"
    out: str = "./invot_out"

    def __post_init__(self):
        """Validate configuration after initialization."""
        if isinstance(self.costs, (str, dict)):
            self.costs = [self.costs]
        self.validate()

    def problems(self) -> List[str]:
        """Every violated range or enumeration, one message each."""
        found: List[str] = []
        if self.command not in COMMANDS:
            found.append(f"command must be one of {list(COMMANDS)}, got {self.command!r}")
        if self.method not in METHODS:
            found.append(f"method must be fourier or post, got {self.method!r}")
        if not isinstance(self.grid_n, int) or not 101 <= self.grid_n <= MAX_GRID_N:
            found.append(f"grid_n must be an integer in [101, {MAX_GRID_N}], got {self.grid_n!r}")
        if not isinstance(self.lp_n, int) or not 2 <= self.lp_n <= MAX_LP_N:
            found.append(f"lp_n must be an integer in [2, {MAX_LP_N}], got {self.lp_n!r}")
        if not isinstance(self.reg_eps, (int, float)) or not 0 < self.reg_eps < 1:
            found.append(f"reg_eps must lie in (0, 1), got {self.reg_eps!r}")
        if not isinstance(self.post_order, int) or not 1 <= self.post_order <= 30:
            found.append(f"post_order must be an integer in [1, 30], got {self.post_order!r}")
        if self.poly_degree is not None and (not isinstance(self.poly_degree, int) or not 0 <= self.poly_degree <= 4):
            found.append(f"poly_degree must be null or an integer in [0, 4], got {self.poly_degree!r}")
        if not isinstance(self.tol, (int, float)) or not self.tol > 0:
            found.append(f"tol must be positive, got {self.tol!r}")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            found.append(f"jobs must be a positive integer, got {self.jobs!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            found.append(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.log_level not in LOG_LEVELS:
            found.append(f"invalid log_level {self.log_level!r}")
        if not self.out:
            found.append("out must name a directory")
        return found

    def validate(self) -> None:
        found = self.problems()
        if found:
            raise ConfigValidationError("; ".join(found), operation="RunConfig", problems=found)

    @classmethod
    def known_fields(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "RunConfig":
        """Create a RunConfig from a dictionary; dashes in keys read as underscores."""
        known = set(cls.known_fields())
        normalized = normalize_keys(config_dict)
        return cls(**{k: v for k, v in normalized.items() if k in known})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def merge_with(self, other_config: Dict[str, Any]) -> "RunConfig":
        """New config with ``other_config`` entries on top; None values are skipped."""
        current = self.to_dict()
        current.update({k: v for k, v in other_config.items() if v is not None})
        return self.from_dict(current)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON of every field that can change artifacts."""
        payload = {k: v for k, v in self.to_dict().items() if k not in HASH_EXCLUDED}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ConfigurationManager:
    """Layered configuration loading."""

    DEFAULT_CONFIG_PATHS = ["invot.yaml", "invot.yml", "invot.json", ".invot.yaml"]
    ENV_PREFIX = "INVOT_"

    @classmethod
    def load_config(
        cls,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """
        Load configuration from all sources, later ones winning:
        1. Default values
        2. Config file (explicit path, else the first default location found)
        3. ``.env`` and ``INVOT_*`` environment variables
        4. Explicit overrides
        5. ``INVOT_OUT``
        """
        config_dict = RunConfig().to_dict()

        file_config = cls._load_from_file(config_path)
        if file_config:
            config_dict.update(normalize_keys(file_config))

        env_config = cls._load_from_environment()
        env_out = env_config.pop("out", None)
        config_dict.update(env_config)

        if overrides:
            config_dict.update({k: v for k, v in overrides.items() if v is not None})
        if env_out:
            config_dict["out"] = env_out

        return RunConfig.from_dict(config_dict)

    @classmethod
    def _load_from_file(cls, config_path: Optional[Union[str, Path]] = None) -> Optional[Dict[str, Any]]:
        if config_path:
            path = Path(config_path)
            if not path.is_file():
                raise ParseError(f"config file not found: {path}", operation="load_config")
            return cls.parse_config_file(path)
        for candidate in cls.DEFAULT_CONFIG_PATHS:
            path = Path(candidate)
            if path.is_file():
                return cls.parse_config_file(path)
        return None

    @staticmethod
    def parse_config_file(path: Union[str, Path]) -> Dict[str, Any]:
        """Parse a YAML or JSON mapping.

        Raises:
            ParseError: unreadable file or bad syntax, with 1-based line/column.
        """
        path = Path(path)
        try:
            content = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read config file {path}: {e}", operation="load_config") from e

        if path.suffix.lower() == ".json":
            try:
                data = json.loads(content)
            except json.JSONDecodeError as e:
                raise ParseError(
                    f"invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno, operation="load_config"
                ) from e
        else:
            try:
                data = yaml.safe_load(content)
            except yaml.YAMLError as e:
                mark = getattr(e, "problem_mark", None)
                raise ParseError(
                    f"invalid YAML in {path}: {getattr(e, 'problem', None) or e}",
                    line=mark.line + 1 if mark is not None else None,
                    column=mark.column + 1 if mark is not None else None,
                    operation="load_config",
                ) from e

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ParseError(f"config file {path} must hold a mapping", line=1, column=1, operation="load_config")
        return data

    @classmethod
    def _load_from_environment(cls) -> Dict[str, Any]:
        # real environment wins over .env
        environment = {**dotenv_values(Path(".env")), **os.environ}
        config: Dict[str, Any] = {}

        env_mappings = {
            f"{cls.ENV_PREFIX}GRID_N": ("grid_n", int),
            f"{cls.ENV_PREFIX}LP_N": ("lp_n", int),
            f"{cls.ENV_PREFIX}REG_EPS": ("reg_eps", float),
            f"{cls.ENV_PREFIX}POST_ORDER": ("post_order", int),
            f"{cls.ENV_PREFIX}TOL": ("tol", float),
            f"{cls.ENV_PREFIX}JOBS": ("jobs", int),
            f"{cls.ENV_PREFIX}SEED": ("seed", int),
            f"{cls.ENV_PREFIX}LOG_LEVEL": ("log_level", str.upper),
            f"{cls.ENV_PREFIX}OUT": ("out", str),
        }

        for env_var, (config_key, converter) in env_mappings.items():
            value = environment.get(env_var)
            if value is not None and value != "":
                try:
                    config[config_key] = converter(value)
                except (ValueError, TypeError) as e:
                    raise ConfigValidationError(
                        f"invalid value for {env_var}: {value} ({e})", operation="load_config"
                    ) from e

        return config

    @classmethod
    def save_config(cls, config: RunConfig, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix.lower() == ".json":
            path.write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        else:
            document = yaml.safe_dump(config.to_dict(), default_flow_style=False, sort_keys=True)
            path.write_text(document, encoding="utf-8")
