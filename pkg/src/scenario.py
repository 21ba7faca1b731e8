"""
Scenario Runner
Parses scenario files, applies Convention (*), runs the requested
computations and writes the declared outputs

A run never raises for numerical failures: each declared output is tracked
in a RunPlan and a failure is recorded against the outputs it prevents.
"""

import json
import pathlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, List, Sequence, Tuple

from pydantic import ValidationError

from .core.errors import MeasureError, ScenarioError, SelmutError
from .dynamics import Trajectory, apply_convention_star, iterate
from .fitness import FitnessModel
from .limits import LimitResult, condensation_report, expected_convergence, limit_distribution
from .measure import Measure, kolmogorov_distance, levy_distance, total_variation, upper_support
from .run_state import RunPlan, log_run_plan
from .schemas import OutputName, ScenarioConfig
from .utils.logging_config import SelmutLogger
from .utils.path_utils import PathUtils
from .verify import CheckReport, run_verification
from . import codec

logger = SelmutLogger.get_logger(__name__)


class Command(str, Enum):
    """What a run computes"""
    ITERATE = "iterate"
    LIMIT = "limit"
    VERIFY = "verify"
    COMPARE = "compare"
    ALL = "all"


PRODUCIBLE: Dict[Command, FrozenSet[OutputName]] = {
    Command.ITERATE: frozenset({
        OutputName.TRAJECTORY_CSV, OutputName.FINAL_STATE_CSV, OutputName.DIAGNOSTICS_CSV,
    }),
    Command.LIMIT: frozenset({OutputName.LIMIT_JSON, OutputName.DIAGNOSTICS_CSV}),
    Command.VERIFY: frozenset({OutputName.CHECKS_JSON, OutputName.DIAGNOSTICS_CSV}),
    Command.COMPARE: frozenset({
        OutputName.TRAJECTORY_CSV, OutputName.FINAL_STATE_CSV,
        OutputName.LIMIT_JSON, OutputName.DIAGNOSTICS_CSV,
    }),
    Command.ALL: frozenset(OutputName),
}


# ============================================================================
# Parsing
# ============================================================================

def _field_path(loc: Sequence[Any]) -> str:
    # Union members show up in pydantic locations; keep only the data path.
    parts = [str(p) for p in loc if not (isinstance(p, str) and p[:1].isupper())]
    return ".".join(parts)


def _translate(error: ValidationError) -> ScenarioError:
    first = error.errors()[0]
    message = first["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return ScenarioError(message, field_path=_field_path(first["loc"]) or None)


def parse_config(data: Any) -> ScenarioConfig:
    """
    Validate a scenario object and resolve its measures.

    Raises:
        ScenarioError: On schema violations (with the dotted field path),
            invalid measures and non-probability measures
    """
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise _translate(e) from e
    for name, resolve in (("p0", config.resolve_p0), ("q", config.resolve_q)):
        try:
            u = resolve()
        except MeasureError as e:
            raise ScenarioError(str(e), field_path=name) from e
        if not u.is_probability():
            raise ScenarioError(
                f"total mass {u.total_mass!r} is not 1", field_path=name
            )
    try:
        config.build_model()
    except ValueError as e:
        raise ScenarioError(str(e), field_path="model") from e
    return config


def parse_scenario(path: str) -> ScenarioConfig:
    """
    Read and validate a scenario file.

    Raises:
        ScenarioError: If the file is missing, not JSON, or invalid
    """
    file_path = pathlib.Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path} is not valid JSON: {e}") from e
    config = parse_config(data)
    logger.debug(f"Parsed scenario {path}")
    return config


# ============================================================================
# Execution
# ============================================================================

@dataclass(frozen=True)
class PreparedScenario:
    """Scenario after measure resolution and Convention (*)"""
    config: ScenarioConfig
    model: FitnessModel
    p0_original: Measure
    p0: Measure
    q: Measure
    bound: float
    convention_applied: bool

    @property
    def limit_a(self) -> float:
        return self.bound if self.config.limit_a is None else self.config.limit_a


def prepare_scenario(config: ScenarioConfig) -> PreparedScenario:
    """
    Resolve measures, apply Convention (*) and fix the ambient bound M.

    Without a bound, M = m_{p0} after Convention (*). An explicit bound is
    the ambient M: p0 is kept as given and both supports only need to lie
    in [0, M].
    """
    model = config.build_model()
    p0_original = config.resolve_p0()
    q = config.resolve_q()
    if config.bound is None:
        p0, q, bound = apply_convention_star(p0_original, q, model, config.beta)
    else:
        p0, bound = p0_original, config.bound
    if config.limit_a is not None and config.limit_a > bound:
        raise ScenarioError(f"{config.limit_a!r} exceeds M={bound!r}", field_path="limit_a")
    return PreparedScenario(
        config=config,
        model=model,
        p0_original=p0_original,
        p0=p0,
        q=q,
        bound=bound,
        convention_applied=p0 is not p0_original,
    )


class ScenarioRun:
    """Lazily computed artifacts of one scenario for one command"""

    def __init__(self, prepared: PreparedScenario, command: Command, label: str = ""):
        self.prepared = prepared
        self.command = command
        self.label = label

    @cached_property
    def trajectory(self) -> Trajectory:
        p = self.prepared
        return iterate(
            p.model, p.p0, p.q, p.config.beta,
            stop=p.config.stop,
            bound=p.bound,
            keep_history=p.config.keep_history,
        )

    @cached_property
    def limit(self) -> LimitResult:
        p = self.prepared
        result = limit_distribution(p.model, p.q, p.config.beta, p.limit_a)
        logger.info(
            f"Limit at a={p.limit_a!r}: {result.case_tag.value}, "
            f"criterion {codec.format_float(result.criterion_value)}, atom {result.atom_at_a!r}"
        )
        return result

    @cached_property
    def checks(self) -> List[CheckReport]:
        p = self.prepared
        spec = p.config.verify
        return run_verification(
            p.model,
            p.config.beta,
            seed=p.config.seed,
            n_pairs=spec.n_pairs,
            n_coupling_pairs=spec.n_coupling_pairs,
            coupling_steps=spec.coupling_steps,
            n_recursion_scenarios=spec.n_recursion_scenarios,
            recursion_steps=spec.recursion_steps,
            grid_size=spec.grid_size,
            q=p.q,
            a_values=[f * p.bound for f in spec.a_fractions],
            bound=p.bound,
        )

    @cached_property
    def active(self) -> FrozenSet[OutputName]:
        """Outputs whose computations this run performs"""
        if self.command == Command.ALL:
            return frozenset(self.prepared.config.outputs)
        return PRODUCIBLE[self.command]

    def _uses(self, *names: OutputName) -> bool:
        return any(n in self.active for n in names)

    def diagnostics(self) -> List[Tuple[str, Any]]:
        p = self.prepared
        rows: List[Tuple[str, Any]] = [
            ("scenario", self.label),
            ("command", self.command.value),
            ("model", p.model.kind),
            ("gamma", getattr(p.model, "gamma", None)),
            ("beta", p.config.beta),
            ("bound", p.bound),
            ("convention_star_applied", p.convention_applied),
        ]
        if p.convention_applied:
            rows.append(("convention_star", f"m_q={upper_support(p.q)!r} > m_p0, p_1 taken as p_0"))
        if self._uses(OutputName.TRAJECTORY_CSV, OutputName.FINAL_STATE_CSV):
            t = self.trajectory
            rows += [
                ("stop_reason", t.stop_reason.value),
                ("iterations", t.iterations),
                ("final_tv_delta", t.diagnostics[-1].tv_delta),
                ("terminal_atom_mass", float(t.atom_mass_series[-1])),
            ]
        if self._uses(OutputName.LIMIT_JSON):
            lim = self.limit
            rows += [
                ("limit_a", lim.a),
                ("case", lim.case_tag.value),
                ("criterion", lim.criterion_value),
                ("root", lim.root),
                ("atom_at_a", lim.atom_at_a),
            ]
        if self._uses(OutputName.TRAJECTORY_CSV, OutputName.FINAL_STATE_CSV) and self._uses(
            OutputName.LIMIT_JSON
        ):
            rows += self._comparison()
        if self._uses(OutputName.CHECKS_JSON):
            reports = self.checks
            rows += [
                ("checks_total", len(reports)),
                ("checks_passed", sum(1 for r in reports if r.passed)),
            ]
        return rows

    def _comparison(self) -> List[Tuple[str, Any]]:
        p = self.prepared
        final, lim = self.trajectory.final, self.limit
        target = lim.measure
        rows: List[Tuple[str, Any]] = [
            ("tv_gap", total_variation(final, target)),
            ("levy_gap", levy_distance(final, target)),
            ("kolmogorov_gap", kolmogorov_distance(final, target)),
        ]
        if lim.a == p.bound:
            below = max(
                (x for x in target.locations.tolist() + final.locations.tolist() if x < p.bound),
                default=0.0,
            )
            report = condensation_report(lim, self.trajectory)
            expectation = expected_convergence(p.p0, p.q, lim, p.bound)
            rows += [
                ("kolmogorov_gap_below_M", kolmogorov_distance(final, target, upto=below)),
                ("condensation", report.condensation),
                ("limit_atom_at_M", report.limit_atom),
                ("max_trajectory_atom_mass", report.max_trajectory_atom_mass),
                ("expected_convergence", expectation.mode.value),
                ("expected_convergence_reason", expectation.reason),
            ]
        logger.info(
            f"Gap to limit: TV {codec.format_float(rows[0][1])}, "
            f"Lévy {codec.format_float(rows[1][1])}"
        )
        return rows

    def render(self, name: OutputName) -> str:
        if name == OutputName.TRAJECTORY_CSV:
            return codec.trajectory_csv(self.trajectory)
        if name == OutputName.FINAL_STATE_CSV:
            return codec.measure_csv(self.trajectory.final)
        if name == OutputName.LIMIT_JSON:
            return codec.limit_json(self.limit)
        if name == OutputName.CHECKS_JSON:
            return codec.checks_json(self.checks)
        return codec.diagnostics_csv(self.diagnostics())


def run_scenario(
    config: ScenarioConfig,
    scenario_path: str = "scenario.json",
    out_dir: str = ".",
    command: Command = Command.ALL,
) -> RunPlan:
    """
    Run one scenario and write its declared outputs to out_dir.

    Outputs the command cannot produce are recorded as failed. The returned
    plan's exit_status is 0 iff every declared output was written.
    """
    command = Command(command)
    plan = RunPlan.create(
        scenario_path, command.value, [o.value for o in config.outputs], out_dir
    )
    try:
        prepared = prepare_scenario(config)
    except SelmutError as e:
        logger.error(f"❌ {scenario_path}: {e}")
        plan.fail(str(e))
        log_run_plan(plan, logger)
        return plan

    run = ScenarioRun(prepared, command, label=pathlib.Path(scenario_path).stem)
    if not config.outputs and command != Command.ALL:
        # Nothing declared: compute anyway so the log carries the results.
        try:
            run.diagnostics()
        except SelmutError as e:
            plan.fail(str(e))

    PathUtils.ensure_dir_exists(out_dir)
    for task in plan.outputs:
        name = OutputName(task.name)
        if name not in PRODUCIBLE[command]:
            task.fail(f"{name.value} is not produced by '{command.value}'")
            continue
        try:
            text = run.render(name)
            pathlib.Path(task.path).write_text(text, encoding="utf-8")
        except (SelmutError, OSError) as e:
            logger.error(f"❌ {task.name} failed: {e}")
            task.fail(f"{type(e).__name__}: {e}")
            continue
        if task.mark_written():
            logger.info(f"Wrote {task.path}")

    log_run_plan(plan, logger)
    return plan


def run_scenario_file(
    path: str,
    out_dir: str = ".",
    command: Command = Command.ALL,
) -> RunPlan:
    """Parse and run one scenario file; parse errors fail the plan"""
    try:
        config = parse_scenario(path)
    except ScenarioError as e:
        logger.error(f"❌ {path}: {e}")
        plan = RunPlan(scenario_path=path, command=Command(command).value)
        plan.fail(str(e))
        return plan
    return run_scenario(config, path, out_dir, command)


def _run_entry(args: Tuple[str, str, str]) -> Dict[str, Any]:
    path, out_dir, command = args
    return run_scenario_file(path, out_dir, Command(command)).to_dict()


def run_batch(
    paths: Sequence[str],
    out_dir: str = ".",
    command: Command = Command.ALL,
    workers: int = 1,
) -> List[RunPlan]:
    """
    Run several scenario files; with workers > 1 they run in a process pool.

    Plans come back in the order of `paths`.
    """
    command = Command(command)
    names = [pathlib.Path(p).stem for p in paths]
    if len(set(names)) != len(names):
        logger.warning("Scenario files share a stem; their outputs overwrite each other")
    if workers <= 1 or len(paths) <= 1:
        return [run_scenario_file(p, out_dir, command) for p in paths]
    jobs = [(p, out_dir, command.value) for p in paths]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [RunPlan.from_dict(d) for d in pool.map(_run_entry, jobs)]
