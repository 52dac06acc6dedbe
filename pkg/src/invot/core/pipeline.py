"""
Pipeline orchestration: one RunConfig in, artifacts and a manifest out.
"""

from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .. import __version__
from ..exceptions import ConfigValidationError, DegenerateGraph, InvalidCost, MissingSamples
from ..forward.concave import concave_ot_1d
from ..forward.costs import CostKind, CostSpec
from ..forward.lp import LPResult, ot_lp
from ..forward.quantile import Potentials1D, monotone_map, ot_cost_quantile, potential_derivative_1d, potentials_1d
from ..identify.demos import run_demo
from ..identify.search import ordered_costs_check, plans_only_nonidentifiability, values_equal_on_family
from ..measures.discrete import discretize
from ..measures.families import LocationScaleFamily
from ..measures.measure1d import Measure1D
from ..models import ManifestModel, parse_cost, parse_measure
from ..recovery.assemble import DEFAULT_POINTS, RecoveredCost, ValueAnchor, assemble_convex_cost, recover_concave
from ..recovery.conjugate import conjugate_graph_from_lp, conjugate_graph_from_map
from ..recovery.values import DEFAULT_POST_POINTS, recover_from_values_locscale
from ..transforms.deconvolution import SpectralRegularization
from ..transforms.gtransform import GTransformSamples, value_surface_locscale
from ..transforms.laplace import post_sampling_plan
from ..utils.file_saver import (
    ArtifactWriter,
    describe_input,
    read_observations_csv,
    read_surface_csv,
    write_surface_csv,
)
from ..utils.logging import get_logger
from ..utils.metrics import MetricsCollector
from .config import RunConfig
from .grid import GridFunction

SURFACE_A = np.linspace(-6.0, 6.0, 97)
SURFACE_B = 2.0
INTERIOR_FRACTION = 0.8
ORDERED_GRID = np.linspace(-2.0, 2.0, 41)

Summary = Dict[str, Any]


def _interior(lo: float, hi: float, fraction: float = INTERIOR_FRACTION, n: int = 201) -> np.ndarray:
    margin = 0.5 * (1.0 - fraction) * (hi - lo)
    return np.linspace(lo + margin, hi - margin, n)


class InvotPipeline:
    """Runs the command named in a RunConfig and records what it produced."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.config_hash = config.config_hash()
        self.writer = ArtifactWriter(config.out, self.config_hash)
        self.logger = get_logger(__name__)
        self.metrics = MetricsCollector()
        self.inputs: List[Dict[str, Any]] = []
        self.tolerances: Dict[str, Optional[float]] = {"tol": config.tol}
        self.handlers: Dict[str, Callable[[], Summary]] = {
            "forward": self.forward,
            "potentials": self.potentials,
            "recover-map": self.recover_map,
            "recover-values": self.recover_values,
            "recover-concave": self.recover_concave,
            "identify": self.identify,
            "demo": self.demo,
        }

    def run(self) -> Summary:
        """Execute the configured command; the summary is also written as summary.json."""
        command = self.config.command
        self.logger.info(
            "pipeline started",
            extra={"extra_data": {"command": command, "config_hash": self.config_hash}},
        )
        with self.metrics.stage(command):
            summary = self.handlers[command]()
        self.writer.write_json("summary.json", summary)
        manifest = ManifestModel(
            version=__version__,
            command=command,
            config_hash=self.config_hash,
            config=self.config.to_dict(),
            inputs=[record for record in self.inputs if record is not None],
            tolerances=self.tolerances,
        )
        self.writer.write_manifest(manifest.model_dump(exclude={"artifacts"}))
        self.logger.info(
            "pipeline finished",
            extra={"extra_data": {"command": command, "metrics": self.metrics.get_metrics()}},
        )
        return summary

    # -- inputs ---------------------------------------------------------------

    def _measure(self, name: str) -> Measure1D:
        value = getattr(self.config, name)
        if value is None:
            raise MissingSamples(f"{self.config.command} needs --{name}", operation=self.config.command)
        self.inputs.append(describe_input(name, value))
        return parse_measure(value).build(self.config.grid_n)

    def _costs(self, minimum: int = 1) -> List[CostSpec]:
        if len(self.config.costs) < minimum:
            raise InvalidCost(
                f"{self.config.command} needs at least {minimum} cost(s)", operation=self.config.command
            )
        costs = []
        for index, value in enumerate(self.config.costs):
            self.inputs.append(describe_input(f"costs[{index}]", value))
            costs.append(parse_cost(value).build())
        return costs

    def _family(self) -> LocationScaleFamily:
        try:
            return LocationScaleFamily.builtin(self.config.family, n=self.config.grid_n)
        except ValueError:
            raise ConfigValidationError(
                f"family must be a builtin generator tag, got {self.config.family!r}", operation=self.config.command
            ) from None

    # -- artifacts ------------------------------------------------------------

    def _write_potentials(self, potentials: Potentials1D) -> None:
        self.writer.write_csv(
            "potentials_f.csv", ("x", "f", "fprime"), potentials.f.x, potentials.f.y, potentials.fprime.y
        )
        self.writer.write_csv("potentials_g.csv", ("y", "g"), potentials.g.x, potentials.g.y)
        self.writer.write_csv("map.csv", ("x", "T"), potentials.transport.x, potentials.transport.y)

    def _write_plan(self, result: LPResult, name: str = "plan.csv") -> None:
        entries = result.coupling.entries(tol=1e-15)
        self.writer.write_csv(
            name,
            ("i", "j", "mass"),
            [e[0] for e in entries],
            [e[1] for e in entries],
            [e[2] for e in entries],
        )

    def _write_recovered(self, recovered: RecoveredCost) -> None:
        self.writer.write_csv("hprime.csv", ("x", "hprime"), recovered.hprime.x, recovered.hprime.y)
        self.writer.write_csv("recovered.csv", ("x", "h"), recovered.h.x, recovered.h.y)
        self.writer.write_csv("graph.csv", ("y", "z"), recovered.inverse.x, recovered.inverse.y)

    # -- commands -------------------------------------------------------------

    def forward(self) -> Summary:
        (cost, *_) = self._costs()
        mu, nu = self._measure("mu"), self._measure("nu")
        self.tolerances["lp_mass"] = 1e-9
        if not cost.is_convex:
            with self.metrics.stage("concave"):
                transport = concave_ot_1d(cost, mu, nu, n=self.config.lp_n)
            summary: Summary = {
                "cost": cost.name,
                "value": transport.value,
                "leftover_mass": transport.leftover_mass,
                "unique_potentials": transport.unique_potentials,
            }
            if transport.lp is not None:
                self._write_plan(transport.lp)
                self.writer.write_csv(
                    "potentials_f.csv", ("x", "f"), transport.lp.coupling.rows.locations, transport.lp.potentials.u
                )
                self.writer.write_csv(
                    "potentials_g.csv", ("y", "g"), transport.lp.coupling.cols.locations, transport.lp.potentials.v
                )
                summary["duality_gap"] = transport.lp.duality_gap
            return summary

        with self.metrics.stage("quantile"):
            value = ot_cost_quantile(cost, mu, nu)
            potentials = potentials_1d(cost, mu, nu)
        with self.metrics.stage("lp"):
            lp = ot_lp(discretize(mu, self.config.lp_n), discretize(nu, self.config.lp_n), cost)
        self._write_potentials(potentials)
        self._write_plan(lp)
        return {
            "cost": cost.name,
            "value": value,
            "dual_value": potentials.dual_value,
            "lp_n": self.config.lp_n,
            "lp_value": lp.value,
            "lp_duality_gap": lp.duality_gap,
            "lp_dual_violation": lp.dual_violation,
        }

    def potentials(self) -> Summary:
        (cost, *_) = self._costs()
        mu, nu = self._measure("mu"), self._measure("nu")
        value = ot_cost_quantile(cost, mu, nu)
        potentials = potentials_1d(cost, mu, nu)
        self._write_potentials(potentials)
        violation = potentials.feasibility_violation(cost)
        self.tolerances["feasibility"] = 1e-8
        self.tolerances["relative_duality_gap"] = 1e-3
        gap = abs(potentials.dual_value - value) / max(abs(value), 1e-300)
        certificates = {
            "feasibility_violation": violation,
            "relative_duality_gap": gap,
            "certified": bool(violation <= 1e-8 and gap <= 1e-3),
        }
        self.writer.write_json("certificates.json", certificates)
        return {
            "cost": cost.name,
            "value": value,
            "dual_value": potentials.dual_value,
            "identified_domain": [float(np.min(potentials.fprime.y)), float(np.max(potentials.fprime.y))],
            **certificates,
        }

    def _observed_map(self, kind: CostKind):
        columns = read_observations_csv(self.config.observations)
        self.inputs.append(describe_input("observations", self.config.observations))
        transport = GridFunction(columns["x"], columns["T"])
        fprime = GridFunction(columns["x"], columns["fprime"])
        return conjugate_graph_from_map(transport, fprime, kind)

    def recover_map(self) -> Summary:
        truth: Optional[CostSpec] = None
        mu: Optional[Measure1D] = None
        nu: Optional[Measure1D] = None
        if self.config.observations:
            graph = self._observed_map(CostKind.CONVEX)
        else:
            (truth, *_) = self._costs()
            mu, nu = self._measure("mu"), self._measure("nu")
            transport = monotone_map(mu, nu)
            fprime = potential_derivative_1d(truth, mu, nu)
            graph = conjugate_graph_from_map(transport, fprime)

        anchor = None
        if self.config.alpha is not None:
            if mu is None or nu is None:
                mu, nu = self._measure("mu"), self._measure("nu")
            anchor = ValueAnchor(mu, nu, float(self.config.alpha))
        self.tolerances["monotone"] = 1e-6
        with self.metrics.stage("assemble"):
            recovered = assemble_convex_cost(graph, value_anchor=anchor, n=DEFAULT_POINTS)
        self._write_recovered(recovered)
        report = recovered.to_dict()
        if truth is not None:
            x = _interior(*recovered.identified_domain)
            error = np.abs(recovered.derivative(x) - truth.derivative(x))
            report["diagnostics"]["hprime_max_error"] = float(np.max(error))
        self.writer.write_json("recovery.json", report)
        return {key: report[key] for key in ("identified_domain", "k", "k_method", "diagnostics")}

    def recover_concave(self) -> Summary:
        truth = None
        if self.config.observations:
            graph = self._observed_map(CostKind.CONCAVE)
        else:
            (truth, *_) = self._costs()
            mu, nu = self._measure("mu"), self._measure("nu")
            with self.metrics.stage("concave"):
                transport = concave_ot_1d(truth, mu, nu, n=self.config.lp_n)
            if transport.lp is None:
                raise DegenerateGraph("no leftover mass to transport", operation="recover-concave")
            graph = conjugate_graph_from_lp(transport.lp, CostKind.CONCAVE)

        recovered = recover_concave(graph)
        self._write_recovered(recovered)
        report = recovered.to_dict()
        if truth is not None:
            s, t = recovered.inverse.x, recovered.inverse.y
            expected = truth.conjugate_gradient(s)
            report["diagnostics"]["inverse_max_relative_error"] = float(np.max(np.abs(t - expected) / np.abs(expected)))
        self.writer.write_json("recovery.json", report)
        return {key: report[key] for key in ("identified_domain", "k", "k_method", "diagnostics")}

    def _surface(self, family: LocationScaleFamily, truth: Optional[CostSpec]) -> GTransformSamples:
        if self.config.surface:
            self.inputs.append(describe_input("surface", self.config.surface))
            return read_surface_csv(self.config.surface, family.name.value)
        if truth is None:
            raise MissingSamples(
                "recover-values needs --surface or a --cost to generate one", operation="recover-values"
            )
        if self.config.method == "post":
            scales = post_sampling_plan(DEFAULT_POST_POINTS, self.config.post_order, family.name)
            params = [(0.0, float(b)) for b in scales]
        else:
            params = [(float(a), SURFACE_B) for a in SURFACE_A]
        with self.metrics.stage("surface"):
            return value_surface_locscale(truth, family, params)

    def recover_values(self) -> Summary:
        truth = self._costs()[0] if self.config.costs else None
        family = self._family()
        samples = self._surface(family, truth)
        write_surface_csv(self.writer, samples)
        self.tolerances["reg_eps"] = self.config.reg_eps

        reg = SpectralRegularization(eps=self.config.reg_eps)
        with self.metrics.stage("invert"):
            recovery = recover_from_values_locscale(
                samples,
                family,
                self.config.method,
                reg=reg,
                poly_degree=self.config.poly_degree,
                order=self.config.post_order,
            )
        self.writer.write_csv("recovered.csv", ("x", "h"), recovery.h.x, recovery.h.y)
        report = recovery.to_dict()

        if truth is not None:
            x, h = recovery.h.x, recovery.h.y
            if self.config.method == "fourier":
                half = 0.25 * (x[-1] - x[0])
                inner = np.abs(x - 0.5 * (x[0] + x[-1])) <= half + 1e-12
            else:
                inner = np.ones(x.size, dtype=bool)
            expected = truth(x[inner])
            report["relative_l2_error"] = float(np.linalg.norm(h[inner] - expected) / np.linalg.norm(expected))
        self.writer.write_json("recovery.json", report)
        return {k: v for k, v in report.items() if k != "h"}

    def identify(self) -> Summary:
        costs = self._costs()
        summary: Summary = {"costs": [c.name for c in costs]}
        if len(costs) >= 2:
            family = self._family()
            c1, c2 = costs[0], costs[1]
            with self.metrics.stage("lattice"):
                report = values_equal_on_family(
                    c1, c2, family, tol=self.config.tol, jobs=self.config.jobs, lp_crosscheck_n=self.config.lp_n
                )
            self.writer.write_csv(
                "lattice.csv",
                ("a", "b", "gap"),
                [p[0] for p in report.lattice],
                [p[1] for p in report.lattice],
                [p[2] for p in report.lattice],
            )
            ordered, witness = ordered_costs_check(c1, c2, ORDERED_GRID, family, tol=self.config.tol)
            summary["values"] = report.to_dict()
            summary["ordered"] = {"ordered": ordered, "witness": witness}
        if self.config.mu is not None and self.config.nu is not None:
            mu, nu = self._measure("mu"), self._measure("nu")
            with self.metrics.stage("plans"):
                plans = plans_only_nonidentifiability(costs, mu, nu, n=self.config.lp_n, tol=self.config.tol)
            summary["plans"] = plans.to_dict()
        self.writer.write_json("identify.json", summary)
        return summary

    def demo(self) -> Summary:
        report = run_demo(self.config.demo, seed=self.config.seed)
        self.writer.write_json("demo.json", report)
        return report
