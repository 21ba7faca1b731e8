"""
Run State Management
Tracks every declared output of a scenario run and verifies it on disk
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
from enum import Enum

from .utils.path_utils import PathUtils


class OutputStatus(Enum):
    """Output production status"""
    PENDING = "pending"
    WRITTEN = "written"
    FAILED = "failed"


@dataclass
class OutputTask:
    """One declared output file"""
    name: str
    path: str
    status: OutputStatus = OutputStatus.PENDING
    error: Optional[str] = None

    def mark_written(self) -> bool:
        """
        Mark as written if the file exists and has content.
        Returns False (and marks failed) otherwise.
        """
        if PathUtils.file_exists(self.path):
            self.status = OutputStatus.WRITTEN
            self.error = None
            return True
        self.fail(f"Missing or empty file: {self.path}")
        return False

    def fail(self, error: str):
        self.status = OutputStatus.FAILED
        self.error = error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "path": self.path,
            "status": self.status.value,
            "error": self.error,
        }


@dataclass
class RunPlan:
    """All declared outputs of one scenario run"""
    scenario_path: str
    command: str
    outputs: List[OutputTask] = field(default_factory=list)
    error: Optional[str] = None

    @classmethod
    def create(cls, scenario_path: str, command: str, names: List[str], out_dir: str) -> "RunPlan":
        return cls(
            scenario_path=scenario_path,
            command=command,
            outputs=[
                OutputTask(name, PathUtils.output_path(out_dir, scenario_path, name))
                for name in names
            ],
        )

    def fail(self, error: str):
        """Scenario-level failure: every unfinished output fails with it"""
        self.error = error
        for task in self.outputs:
            if task.status != OutputStatus.WRITTEN:
                task.fail(error)

    def is_complete(self) -> bool:
        """True iff no scenario error and every output is written and present"""
        if self.error is not None:
            return False
        return all(
            t.status == OutputStatus.WRITTEN and PathUtils.file_exists(t.path)
            for t in self.outputs
        )

    @property
    def exit_status(self) -> int:
        return 0 if self.is_complete() else 1

    def get_progress(self) -> Dict[str, int]:
        return {
            "total": len(self.outputs),
            "written": sum(1 for t in self.outputs if t.status == OutputStatus.WRITTEN),
            "pending": sum(1 for t in self.outputs if t.status == OutputStatus.PENDING),
            "failed": sum(1 for t in self.outputs if t.status == OutputStatus.FAILED),
        }

    def to_dict(self) -> Dict[str, Any]:
        """Plain-data form handed back by batch worker processes"""
        return {
            "scenario_path": self.scenario_path,
            "command": self.command,
            "error": self.error,
            "outputs": [t.to_dict() for t in self.outputs],
            "progress": self.get_progress(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunPlan":
        outputs = [
            OutputTask(
                name=t["name"],
                path=t["path"],
                status=OutputStatus(t["status"]),
                error=t.get("error"),
            )
            for t in data.get("outputs", [])
        ]
        return cls(
            scenario_path=data["scenario_path"],
            command=data["command"],
            outputs=outputs,
            error=data.get("error"),
        )


def log_run_plan(plan: RunPlan, logger):
    """Log the outcome of a run, one line per output"""
    logger.info(f"{'=' * 80}")
    progress = plan.get_progress()
    logger.info(
        f"📋 {plan.command} {plan.scenario_path}: "
        f"{progress['written']}/{progress['total']} outputs written"
    )
    if plan.error:
        logger.error(f"❌ Scenario error: {plan.error}")

    status_icons = {
        OutputStatus.WRITTEN: "✅",
        OutputStatus.PENDING: "⏳",
        OutputStatus.FAILED: "❌",
    }
    for task in plan.outputs:
        icon = status_icons.get(task.status, "❓")
        logger.info(f"{icon} {task.name}: {task.path}")
        if task.status == OutputStatus.FAILED:
            logger.info(f"   ❌ Error: {task.error}")
    logger.info(f"{'=' * 80}")
