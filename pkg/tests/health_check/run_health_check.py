#!/usr/bin/env python3
"""
Health Check Runner
Runs every selmut test module in its own pytest process and writes
health_check_report.json

Usage:
    python tests/health_check/run_health_check.py
    python tests/health_check/run_health_check.py --quick    # deselect slow suites
    python tests/health_check/run_health_check.py --verbose  # print output of failures
    python tests/health_check/run_health_check.py --coverage # pytest-cov over src/
    python tests/health_check/run_health_check.py --lint     # ruff, black and mypy diagnostics
"""

import argparse
import importlib
import json
import subprocess
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

PROJECT_ROOT = Path(__file__).parent.parent.parent
TESTS_DIR = PROJECT_ROOT / "tests"

# (path under tests/, title)
TEST_MODULES = [
    ("test_measure.py", "Measure algebra and distances"),
    ("test_fitness.py", "Fitness models and cycle time"),
    ("test_dynamics.py", "Selection-mutation step and trajectories"),
    ("test_limits.py", "Closed-form limits"),
    ("test_verify.py", "Property checks"),
    ("test_run_state.py", "Run state tracking"),
    ("test_scenario.py", "Scenarios, outputs and CLI"),
    ("health_check/test_import_consistency.py", "Import consistency and layers"),
    ("health_check/test_acceptance.py", "Acceptance checks"),
]

REQUIRED_PACKAGES = ["numpy", "scipy", "pydantic", "pytest", "hypothesis"]
COVERAGE_PACKAGES = ["pytest_cov"]

# Advisory: reported, never part of the exit status
LINT_COMMANDS = [
    ("ruff", ["-m", "ruff", "check", "src", "tests"]),
    ("black", ["-m", "black", "--check", "--quiet", "src", "tests"]),
    ("mypy", ["-m", "mypy", "src", "--ignore-missing-imports"]),
]
LINT_PACKAGES = ["ruff", "black", "mypy"]

# pytest exit code when every test of a module was deselected
NO_TESTS_COLLECTED = 5

ICONS = {"PASSED": "✅", "FAILED": "❌", "TIMEOUT": "⏰", "MISSING": "❓"}


@dataclass
class ModuleResult:
    """Outcome of one test module"""
    module: str
    title: str
    status: str
    duration: float = 0.0
    output: str = field(default="", repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "PASSED"


class HealthCheckRunner:
    """Runs the test modules one by one and reports on them"""

    def __init__(
        self,
        verbose: bool = False,
        quick: bool = False,
        coverage: bool = False,
        lint: bool = False,
        timeout: int = 1800,
    ):
        self.verbose = verbose
        self.quick = quick
        self.coverage = coverage
        self.lint = lint
        self.coverage_text: Optional[str] = None
        self.diagnostics: List[Dict[str, object]] = []
        self.timeout = timeout
        self.results: List[ModuleResult] = []
        self.started = 0.0
        self.finished = 0.0

    def environment_issues(self) -> List[str]:
        """Missing packages, old interpreter or no scenario files"""
        issues = []
        if sys.version_info < (3, 11):
            issues.append(f"Python 3.11+ required, found {sys.version.split()[0]}")
        packages = list(REQUIRED_PACKAGES)
        packages += COVERAGE_PACKAGES if self.coverage else []
        packages += LINT_PACKAGES if self.lint else []
        for package in packages:
            try:
                module = importlib.import_module(package)
            except ImportError:
                issues.append(f"{package} not installed")
                continue
            print(f"  ✅ {package} {getattr(module, '__version__', '')}")
        if not any((PROJECT_ROOT / "config" / "scenarios").glob("*.json")):
            issues.append("config/scenarios/ holds no scenario files")
        return issues

    def run_module(self, module: str, title: str) -> ModuleResult:
        path = TESTS_DIR / module
        print(f"\n🧪 {title}  [{module}]")
        if not path.exists():
            return ModuleResult(module, title, "MISSING")

        cmd = [sys.executable, "-m", "pytest", str(path), "-q"]
        cmd += ["-m", "not slow"] if self.quick else []
        cmd += [] if self.verbose else ["--tb=short"]
        cmd += ["--cov=src", "--cov-append", "--cov-report="] if self.coverage else []

        start = time.time()
        try:
            proc = subprocess.run(
                cmd, cwd=str(PROJECT_ROOT), capture_output=True, text=True, timeout=self.timeout
            )
        except subprocess.TimeoutExpired:
            return ModuleResult(module, title, "TIMEOUT", time.time() - start)

        ok = proc.returncode in (0, NO_TESTS_COLLECTED)
        return ModuleResult(
            module, title, "PASSED" if ok else "FAILED",
            time.time() - start, proc.stdout + proc.stderr,
        )

    def run_all(self) -> None:
        self.started = time.time()
        for module, title in TEST_MODULES:
            result = self.run_module(module, title)
            self.results.append(result)
            print(f"   {ICONS[result.status]} {result.status} in {result.duration:.1f}s")
            if self.verbose and not result.ok and result.output:
                print(result.output)
        self.finished = time.time()

    def coverage_report(self) -> str:
        proc = subprocess.run(
            [sys.executable, "-m", "coverage", "report", "--include=src/*"],
            cwd=str(PROJECT_ROOT), capture_output=True, text=True,
        )
        return proc.stdout or proc.stderr

    def run_lint(self) -> None:
        for tool, args in LINT_COMMANDS:
            proc = subprocess.run(
                [sys.executable] + args,
                cwd=str(PROJECT_ROOT), capture_output=True, text=True, timeout=self.timeout,
            )
            clean = proc.returncode == 0
            self.diagnostics.append({
                "tool": tool, "clean": clean, "output": proc.stdout + proc.stderr,
            })
            print(f"  {'✅' if clean else '⚠️ '} {tool}")
            if not clean and self.verbose:
                print(proc.stdout + proc.stderr)

    def summary(self) -> str:
        passed = sum(r.ok for r in self.results)
        lines = [
            "",
            "-" * 72,
            f"selmut health check: {passed}/{len(self.results)} modules passed "
            f"in {self.finished - self.started:.1f}s"
            + (" (slow suites deselected)" if self.quick else ""),
            "-" * 72,
        ]
        lines += [
            f"  {ICONS[r.status]} {r.module:<45} {r.status:<8} {r.duration:7.1f}s"
            for r in self.results
        ]
        return "\n".join(lines)

    def write_report(self) -> Path:
        report = {
            "timestamp": datetime.now().isoformat(),
            "quick": self.quick,
            "duration": self.finished - self.started,
            "modules": [asdict(r) for r in self.results],
            "passed": sum(r.ok for r in self.results),
            "total": len(self.results),
            "coverage": self.coverage_text,
            "diagnostics": self.diagnostics,
        }
        path = PROJECT_ROOT / "health_check_report.json"
        path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        return path

    def run(self) -> int:
        print(f"selmut health check, {datetime.now():%Y-%m-%d %H:%M:%S}, root {PROJECT_ROOT}")
        issues = self.environment_issues()
        if issues:
            print("\n❌ Environment not ready:")
            for issue in issues:
                print(f"  - {issue}")
            return 1

        if self.coverage:
            (PROJECT_ROOT / ".coverage").unlink(missing_ok=True)
        self.run_all()
        print(self.summary())
        if self.coverage:
            self.coverage_text = self.coverage_report()
            print("\n📊 Coverage of src/\n" + self.coverage_text)
        if self.lint:
            print("\n🔍 Lint and type diagnostics (advisory)")
            self.run_lint()
        print(f"\n📄 Report: {self.write_report()}")
        return 0 if all(r.ok for r in self.results) else 1


def main():
    parser = argparse.ArgumentParser(description="Run the selmut health check")
    parser.add_argument("-v", "--verbose", action="store_true", help="Print output of failing modules")
    parser.add_argument("-q", "--quick", action="store_true", help="Deselect tests marked slow")
    parser.add_argument("--coverage", action="store_true", help="Collect coverage of src/ with pytest-cov")
    parser.add_argument("--lint", action="store_true", help="Report ruff, black and mypy diagnostics")
    args = parser.parse_args()
    runner = HealthCheckRunner(
        verbose=args.verbose, quick=args.quick, coverage=args.coverage, lint=args.lint
    )
    sys.exit(runner.run())


if __name__ == "__main__":
    main()
