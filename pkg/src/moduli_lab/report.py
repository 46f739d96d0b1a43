"""JSON reports and representation files."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .lie import lie_context
from .surface import CentralRep

REPORT_VERSION = 1
REP_FILE_VERSION = 1


@dataclass
class Report:
    command: str
    seed: int
    config: dict
    status: str = "pass"
    error: dict | None = None
    rep: dict | None = None
    invariants: list = field(default_factory=list)
    chart: dict | None = None
    samples: dict | None = None
    timing: dict | None = None
    version: int = REPORT_VERSION

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if "version" not in data:
            raise SchemaError("report has no version field")
        if data["version"] != REPORT_VERSION:
            raise SchemaError(f"unsupported report version {data['version']!r}")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise SchemaError(f"unknown report fields: {sorted(unknown)}")
        for key in ("command", "seed", "config"):
            if key not in data:
                raise SchemaError(f"report is missing {key!r}")
        return cls(**data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _plain(obj):
    """Recursively convert numpy scalars and arrays into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_report(report: Report, path: str | Path) -> None:
    Path(path).write_text(report.dumps())


def read_report(path: str | Path) -> Report:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not a JSON document: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("report must be a JSON object")
    return Report.from_dict(data)


# -- representation files ------------------------------------------------------
def rep_to_dict(rep: CentralRep) -> dict:
    return {
        "version": REP_FILE_VERSION,
        "group_id": rep.context.group_id,
        "genus": rep.genus,
        "central_target": [float(x) for x in rep.X_xi],
        "central_twist": int(rep.twist),
        "images": [[[[float(z.real), float(z.imag)] for z in row] for row in a] for a in rep.images],
    }


def rep_from_dict(data: dict) -> CentralRep:
    try:
        if data.get("version") != REP_FILE_VERSION:
            raise SchemaError(f"unsupported representation file version {data.get('version')!r}")
        ctx = lie_context(data["group_id"])
        images = [np.array([[complex(re, im) for re, im in row] for row in a]) for a in data["images"]]
        if len(images) != 2 * int(data["genus"]):
            raise SchemaError("number of images does not match 2 * genus")
        return CentralRep(ctx, tuple(images), data["central_target"], int(data.get("central_twist", 0)))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed representation file: {exc}") from exc


def write_rep_file(rep: CentralRep, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rep_to_dict(rep), indent=2) + "\n")


def read_rep_file(path: str | Path) -> CentralRep:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not a JSON document: {exc}") from exc
    return rep_from_dict(data)
