"""
Config diagnostics: every violated invariant of a run configuration, without
running anything numerical beyond building the input measures.
"""

from pathlib import Path
from typing import Any, Dict, List, Union

from ..core.config import ConfigurationManager, RunConfig, normalize_keys
from ..exceptions import ConfigValidationError, InvotError
from ..forward.costs import grid_cost_diagnostics
from ..identify.demos import DEMOS
from ..measures.families import FamilyName
from ..models import parse_cost, parse_measure

COMMAND_INPUTS = {
    "forward": ("costs", "mu", "nu"),
    "potentials": ("costs", "mu", "nu"),
    "recover-map": (),
    "recover-values": (),
    "recover-concave": (),
    "identify": ("costs",),
    "demo": ("demo",),
}
INPUT_FIELDS = ("command", "costs", "mu", "nu", "family", "surface", "observations", "demo")


def _error_text(error: InvotError) -> str:
    return f"{type(error).__name__}: {error.message}"


class ConfigValidator:
    """Static checks behind ``invot validate``."""

    @staticmethod
    def validate_file(path: Union[str, Path]) -> List[str]:
        """Diagnostics for a YAML/JSON config; an empty list means runnable.

        Raises:
            ParseError: the file is unreadable or syntactically broken.
        """
        return ConfigValidator.validate_mapping(ConfigurationManager.parse_config_file(path))

    @staticmethod
    def validate_mapping(raw: Dict[str, Any]) -> List[str]:
        diagnostics: List[str] = []
        normalized = normalize_keys(raw)
        known = set(RunConfig.known_fields())
        for key in sorted(set(normalized) - known):
            diagnostics.append(f"unknown key {key!r}")

        try:
            config = RunConfig.from_dict(normalized)
        except ConfigValidationError as e:
            diagnostics.extend(e.details.get("problems", [e.message]))
            # inputs are still checked against default knobs
            inputs = {k: v for k, v in normalized.items() if k in INPUT_FIELDS}
            if inputs.get("command") not in COMMAND_INPUTS:
                inputs.pop("command", None)
            try:
                config = RunConfig.from_dict(inputs)
            except (ConfigValidationError, TypeError):
                return diagnostics
        except TypeError as e:
            diagnostics.append(f"schema: {e}")
            return diagnostics

        diagnostics.extend(ConfigValidator.validate_config(config))
        return diagnostics

    @staticmethod
    def validate_config(config: RunConfig) -> List[str]:
        """Input-level checks on an already range-checked config."""
        diagnostics: List[str] = []
        for name in COMMAND_INPUTS[config.command]:
            if not getattr(config, name):
                diagnostics.append(f"{config.command} needs {name}")
        if config.command == "identify" and len(config.costs) < 2 and not (config.mu and config.nu):
            diagnostics.append("identify compares at least two costs")
        if config.command == "recover-values" and not (config.surface or config.costs):
            diagnostics.append("recover-values needs a surface file or a cost to generate one")
        if config.command in ("recover-map", "recover-concave") and not config.observations:
            for name in ("costs", "mu", "nu"):
                if not getattr(config, name):
                    diagnostics.append(f"{config.command} needs observations or {name}")

        if config.command == "demo" and config.demo and config.demo not in DEMOS:
            diagnostics.append(f"unknown demo {config.demo!r}")

        if config.family not in {f.value for f in FamilyName} or config.family == FamilyName.CUSTOM_GRID.value:
            diagnostics.append(f"family must be a builtin generator tag, got {config.family!r}")

        for name in ("surface", "observations"):
            value = getattr(config, name)
            if value and not Path(value).is_file():
                diagnostics.append(f"{name} file not found: {value}")

        for name in ("mu", "nu"):
            value = getattr(config, name)
            if value is None:
                continue
            try:
                parse_measure(value).build(config.grid_n)
            except InvotError as e:
                diagnostics.append(f"{name}: {_error_text(e)}")

        for index, value in enumerate(config.costs):
            diagnostics.extend(f"costs[{index}]: {message}" for message in ConfigValidator.cost_diagnostics(value))
        return diagnostics

    @staticmethod
    def cost_diagnostics(value: Any) -> List[str]:
        try:
            model = parse_cost(value)
        except InvotError as e:
            return [_error_text(e)]
        if model.builtin == "grid":
            values = model.h if model.h is not None else model.l
            return grid_cost_diagnostics(model.kind, model.x, values)
        try:
            model.build()
        except InvotError as e:
            return [_error_text(e)]
        return []
