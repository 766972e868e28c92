"""Scenario files and the built-in application scenarios.

A scenario is a flat JSON document: graph, reference shape, motion keys,
simulation keys, seeds and output names. Built-ins cover target enclosing,
inward/outward shaped consensus spirals and the heading-controlled
traveling formation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ScenarioError
from .graphs import FormationGraph
from .motion import MotionSpec
from .shapes import ReferenceShape, center_shape
from .sim import HeadingControl, SimConfig, Trajectory, exact_trajectory, integrate
from .spectral import DesignResult, design_pipeline

SCENARIO_NAMES = ("enclosing", "shaped_consensus_inward", "spiral_outward",
                  "traveling_heading")


@dataclass(frozen=True)
class Scenario:
    name: str
    graph: FormationGraph
    shape: ReferenceShape
    spec: MotionSpec
    sim: SimConfig
    design_seed: int
    method: str  # "rk4" | "exact"
    report_name: str
    trajectory_name: str


def _require(d: dict, key: str, ctx: str):
    if key not in d:
        raise ScenarioError(f"missing key '{key}' in {ctx}")
    return d[key]


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    name = doc.get("name", "unnamed")
    gd = _require(doc, "graph", "scenario")
    n = int(_require(gd, "n", "graph"))
    edges = _require(gd, "edges", "graph")
    try:
        graph = FormationGraph(n, tuple((int(i), int(j)) for i, j in edges))
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"invalid graph.edges: {exc}") from exc

    pts = _require(doc, "shape", "scenario")
    try:
        raw = np.array([complex(x, y) for x, y in pts])
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"invalid shape points: {exc}") from exc
    if raw.size != n:
        raise ScenarioError(f"shape has {raw.size} points for n={n} nodes")
    shape = center_shape(raw)

    md = doc.get("motion", {})
    center = md.get("rotation_center", "centroid")
    if center == "centroid":
        center_agent = None
    else:
        center_agent = int(center)
        if not 1 <= center_agent <= n:
            raise ScenarioError(f"motion.rotation_center {center_agent} out of range")
    try:
        spec = MotionSpec(
            v_star=complex(md.get("v_star_re", 0.0), md.get("v_star_im", 0.0)),
            a=float(md.get("a", 0.0)),
            omega=float(md.get("omega", 0.0)),
            kappa_t=float(md.get("kappa_t", 0.0)),
            kappa_r=float(md.get("kappa_r", 0.0)),
            kappa_s=float(md.get("kappa_s", 0.0)),
            kappa_tilde=float(md.get("kappa_tilde", 1.0)),
            center_agent=center_agent,
        )
    except ValueError as exc:
        raise ScenarioError(f"invalid motion spec: {exc}") from exc

    sd = doc.get("sim", {})
    heading = None
    hd = sd.get("heading_control")
    if hd is not None:
        agent = int(_require(hd, "agent", "heading_control"))
        neighbor = int(_require(hd, "neighbor", "heading_control"))
        if not (1 <= agent <= n and 1 <= neighbor <= n):
            raise ScenarioError("heading_control agent/neighbor out of range")
        if frozenset((agent, neighbor)) not in graph.edges:
            raise ScenarioError(
                f"heading_control pair ({agent},{neighbor}) is not an edge")
        sched = tuple((float(s["until"]), complex(s["re"], s["im"]))
                      for s in _require(hd, "schedule", "heading_control"))
        heading = HeadingControl(agent, neighbor,
                                 float(hd.get("gain", 1.0)), sched)
    p0 = sd.get("initial_condition")
    if p0 is not None:
        p0 = np.array([complex(x, y) for x, y in p0])
        if p0.size != n:
            raise ScenarioError("sim.initial_condition size mismatch")
    try:
        sim = SimConfig(
            dt=float(sd.get("dt", 1e-3)),
            t_end=float(sd.get("t_end", 10.0)),
            p0=p0,
            seed=int(sd.get("seed", 0)),
            box_factor=float(sd.get("box_factor", 2.0)),
            divergence_threshold=float(sd.get("divergence_threshold", 1e9)),
            sample_stride=int(sd.get("sample_stride", 1)),
            heading=heading,
        )
    except ValueError as exc:
        raise ScenarioError(f"invalid sim config: {exc}") from exc

    method = sd.get("method", "rk4")
    if method not in ("rk4", "exact"):
        raise ScenarioError(f"sim.method must be 'rk4' or 'exact', got {method!r}")
    out = doc.get("output", {})
    return Scenario(name=name, graph=graph, shape=shape, spec=spec, sim=sim,
                    design_seed=int(doc.get("seed", 0)), method=method,
                    report_name=out.get("report", "report.json"),
                    trajectory_name=out.get("trajectory", "trajectory.csv"))


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}")
    return scenario_from_dict(doc)


def _deep_merge(base: dict, overrides: Optional[dict]) -> dict:
    if not overrides:
        return base
    out = dict(base)
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def _square_graph() -> dict:
    return {"n": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1], [1, 3]]}


def _decagon_points() -> list:
    r = 1.0 / (2.0 * math.sin(math.pi / 10))
    return [[r * math.cos(2 * math.pi * k / 10), r * math.sin(2 * math.pi * k / 10)]
            for k in range(10)]


def builtin_scenario(name: str, overrides: Optional[dict] = None) -> dict:
    """Scenario document for one of the built-in applications."""
    if name == "enclosing":
        doc = {
            "name": name,
            "graph": {"n": 5, "edges": [[1, 2], [2, 3], [3, 4], [4, 1], [1, 3],
                                        [5, 1], [5, 2], [5, 3], [5, 4]]},
            "shape": [[1, 1], [-1, 1], [-1, -1], [1, -1], [0.3, 0.1]],
            "motion": {"omega": 1.0, "kappa_r": 0.025, "kappa_tilde": 1.0,
                       "rotation_center": 5},
            "sim": {"dt": 0.01, "t_end": 250.0, "seed": 7, "sample_stride": 10},
            "seed": 0,
        }
    elif name in ("shaped_consensus_inward", "spiral_outward"):
        a = -1.0 if name == "shaped_consensus_inward" else 1.0
        doc = {
            "name": name,
            "graph": {"n": 10, "edges": [[k + 1, (k + 1) % 10 + 1] for k in range(10)]},
            "shape": _decagon_points(),
            "motion": {"a": a, "omega": 1.0, "kappa_r": 0.025, "kappa_s": 0.025,
                       "kappa_tilde": 1.0},
            "sim": {"dt": 0.01,
                    "t_end": 400.0 if a < 0 else 250.0,
                    "seed": 7, "sample_stride": 10},
            "seed": 0,
        }
    elif name == "traveling_heading":
        z0 = 2.0  # p*_1 - p*_2 for the unit square below
        sched = [{"until": 50.0 * (k + 1),
                  "re": z0 * math.cos(k * math.pi / 4) * (4.0 if k == 4 else 1.0),
                  "im": z0 * math.sin(k * math.pi / 4) * (4.0 if k == 4 else 1.0)}
                 for k in range(5)]
        doc = {
            "name": name,
            "graph": _square_graph(),
            "shape": [[1, 1], [-1, 1], [-1, -1], [1, -1]],
            "motion": {"v_star_re": 1.0, "kappa_t": 0.05, "kappa_tilde": 1.0},
            "sim": {"dt": 0.01, "t_end": 250.0, "seed": 7, "sample_stride": 10,
                    "heading_control": {"agent": 1, "neighbor": 2, "gain": 1.0,
                                        "schedule": sched}},
            "seed": 0,
        }
    else:
        raise ScenarioError(
            f"unknown scenario {name!r}; choose from {SCENARIO_NAMES}")
    return _deep_merge(doc, overrides)


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    design: DesignResult
    trajectory: Trajectory


def simulate_scenario(sc: Scenario) -> ScenarioResult:
    design = design_pipeline(sc.graph, sc.shape, sc.spec, seed=sc.design_seed)
    runner = exact_trajectory if sc.method == "exact" else integrate
    traj = runner(design.modified.L_tilde, design.bundle.gains, sc.sim, sc.shape)
    return ScenarioResult(sc, design, traj)


def run_scenario(name: str, overrides: Optional[dict] = None) -> ScenarioResult:
    """Build and simulate one of the built-in scenarios."""
    return simulate_scenario(scenario_from_dict(builtin_scenario(name, overrides)))
