"""
Path utilities for selmut

Centralizes how per-scenario output files are named and checked, so the
CLI, the run tracker and the tests agree on locations.
"""

import pathlib


class PathUtils:
    """
    Centralized path operations for scenario outputs.
    """

    # Output name -> file extension
    OUTPUT_EXTENSIONS = {
        "trajectory_csv": ".trajectory.csv",
        "diagnostics_csv": ".diagnostics.csv",
        "final_state_csv": ".final_state.csv",
        "limit_json": ".limit.json",
        "checks_json": ".checks.json",
    }

    @staticmethod
    def output_path(out_dir: str, scenario_path: str, output_name: str) -> str:
        """
        Build the file path of one declared output.

        Args:
            out_dir: Output directory
            scenario_path: Scenario file the output belongs to
            output_name: One of OUTPUT_EXTENSIONS

        Returns:
            Path such as '<out_dir>/<scenario stem>.limit.json'

        Raises:
            ValueError: If output_name is unknown

        Example:
            >>> PathUtils.output_path("out", "config/scenarios/kingman.json", "limit_json")
            'out/kingman.limit.json'
        """
        try:
            suffix = PathUtils.OUTPUT_EXTENSIONS[output_name]
        except KeyError:
            raise ValueError(f"Unknown output: {output_name}")
        stem = pathlib.Path(scenario_path).stem
        return str(pathlib.Path(out_dir) / f"{stem}{suffix}")

    @staticmethod
    def ensure_dir_exists(path: str) -> pathlib.Path:
        """
        Ensure directory exists, creating if necessary.

        Args:
            path: Directory path

        Returns:
            Path object for the directory
        """
        dir_path = pathlib.Path(path)
        dir_path.mkdir(parents=True, exist_ok=True)
        return dir_path

    @staticmethod
    def file_exists(path: str) -> bool:
        """
        Check if file exists and has content.

        Args:
            path: File path

        Returns:
            True if file exists and is not empty
        """
        try:
            file_path = pathlib.Path(path)
            if not file_path.is_file():
                return False
            return file_path.stat().st_size > 0
        except OSError:
            return False
