"""
Output Encoding
CSV and JSON renderings of measures, trajectories, limits and check reports,
and the readers that turn measure files back into measures

Floats are written with repr(), the shortest decimal string that reads back
to the same double, so identical runs produce identical bytes. Non-finite
values are written as the strings "inf", "-inf" and "nan".
"""

import csv
import io
import json
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from .core.errors import MeasureError
from .dynamics import Trajectory
from .limits import LimitResult
from .measure import Measure, make_measure
from .schemas import MeasureDocument
from .verify import CheckReport

MEASURE_COLUMNS = ["x", "m"]
TRAJECTORY_COLUMNS = ["iteration", "tv_delta", "mean_fitness", "atom_mass_at_M", "cycle_time"]


def format_float(value: Optional[float]) -> str:
    """
    Shortest round-trip decimal string; '' for None.

    Example:
        >>> format_float(0.1 + 0.2)
        '0.30000000000000004'
    """
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def jsonable(obj: Any) -> Any:
    """Replace numpy scalars and non-finite floats by JSON-safe values"""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else format_float(value)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


# ============================================================================
# Measures
# ============================================================================

def measure_to_json(u: Measure) -> Dict[str, List[Dict[str, float]]]:
    """{"atoms": [{"x": ..., "m": ...}, ...]} in ascending x"""
    return {"atoms": [{"x": x, "m": m} for x, m in u.atoms()]}


def measure_json(u: Measure) -> str:
    return dumps(measure_to_json(u))


def measure_from_json(data: Union[str, Mapping[str, Any]]) -> Measure:
    """
    Inverse of measure_to_json() / measure_json(); exact for any measure
    those functions wrote.

    Raises:
        MeasureError: On malformed JSON or atoms
    """
    try:
        doc = json.loads(data) if isinstance(data, str) else data
        return MeasureDocument.model_validate(doc).resolve()
    except (json.JSONDecodeError, ValidationError) as e:
        raise MeasureError(f"Invalid measure JSON: {e}") from e


def measure_csv(u: Measure) -> str:
    """Columns x,m"""
    return _csv_text(MEASURE_COLUMNS, ((format_float(x), format_float(m)) for x, m in u.atoms()))


def measure_from_csv(text: str) -> Measure:
    """
    Inverse of measure_csv().

    Raises:
        MeasureError: On a wrong header or a malformed row
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != MEASURE_COLUMNS:
        raise MeasureError(f"Measure CSV must start with the header {','.join(MEASURE_COLUMNS)}")
    try:
        pairs = [(float(x), float(m)) for x, m in rows[1:]]
    except ValueError as e:
        raise MeasureError(f"Malformed measure CSV row: {e}") from e
    return make_measure(pairs)


# ============================================================================
# Runs
# ============================================================================

def trajectory_csv(trajectory: Trajectory) -> str:
    """One row per step; cycle_time is empty for the Kingman model"""
    rows = (
        (
            str(d.iteration),
            format_float(d.tv_delta),
            format_float(d.mean_fitness),
            format_float(d.atom_mass_at_M),
            format_float(d.cycle_time),
        )
        for d in trajectory.diagnostics
    )
    return _csv_text(TRAJECTORY_COLUMNS, rows)


def diagnostics_csv(rows: Sequence[Tuple[str, Any]]) -> str:
    """key,value rows"""
    def cell(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return format_float(value)
        return "" if value is None else str(value)

    return _csv_text(["key", "value"], ((key, cell(value)) for key, value in rows))


def limit_to_dict(result: LimitResult) -> Dict[str, Any]:
    """
    {"case", "root", "criterion", "atoms", "atom_at_a", ...}

    "atoms" lists the whole limit measure, atom at a included.
    """
    return {
        "case": result.case_tag.value,
        "root": result.root,
        "criterion": result.criterion_value,
        "atoms": measure_to_json(result.measure)["atoms"],
        "atom_at_a": result.atom_at_a,
        "a": result.a,
        "model": result.model_kind,
        "residual": result.residual,
        "iterations": result.iterations,
    }


def limit_json(result: LimitResult) -> str:
    return dumps(limit_to_dict(result))


def checks_json(reports: Sequence[CheckReport]) -> str:
    """List of {check, passed, worst_violation, witness, seeds, ...}"""
    return dumps([r.model_dump() for r in reports])
