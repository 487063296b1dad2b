"""Run configuration, suite driver and deterministic report serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .audit import (
    ALL_SUITES,
    GROUP_SUITES,
    O_SUITES,
    AuditContext,
    AuditReport,
    run_group_suites,
    run_o_suites,
)
from .fourier import TOL_ALG, TOL_NORM
from .groups import FiniteGroup, Subgroup, construct_group, enumerate_subgroups, parse_subgroup

CATALOG = (
    "cyclic:2",
    "cyclic:3",
    "cyclic:4",
    "cyclic:6",
    "cyclic:8",
    "cyclic:12",
    "dihedral:6",
    "dihedral:8",
    "dihedral:12",
    "symmetric:3",
    "symmetric:4",
    "quaternion",
    "product:cyclic:2,cyclic:4",
)

ALL_O_MAX_ORDER = 16

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Bad configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    group: str
    O: str | tuple[str, ...] = "all"
    suites: tuple[str, ...] = ("all",)
    tol_alg: float = TOL_ALG
    tol_norm: float = TOL_NORM
    samples: int = 100
    seed: int = 42
    normalizer_filter: bool = False
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        if not (self.tol_alg > 0 and self.tol_norm > 0):
            raise UsageError("tolerances must be positive")
        if self.samples < 1:
            raise UsageError("samples must be at least 1")
        if self.format not in ("json", "text"):
            raise UsageError(f"unknown format {self.format!r}")
        unknown = [s for s in self.suites if s != "all" and s not in ALL_SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(ALL_SUITES)}")

    def selected_suites(self) -> tuple[str, ...]:
        if "all" in self.suites:
            return ALL_SUITES
        return tuple(s for s in ALL_SUITES if s in self.suites)

    def as_json(self) -> dict:
        d = asdict(self)
        d["O"] = self.O if isinstance(self.O, str) else list(self.O)
        d["suites"] = list(self.selected_suites())
        d.pop("out")
        d.pop("format")
        return d


@dataclass
class RunResult:
    exit_code: int
    document: dict
    reports: list[AuditReport] = field(default_factory=list)


def resolve_O(group: FiniteGroup, spec: str | Sequence[str]) -> list[Subgroup]:
    """``"all"`` (only for small groups) or explicit subgroup generator lists."""
    if isinstance(spec, str) and spec.strip().lower() == "all":
        if group.order > ALL_O_MAX_ORDER:
            raise UsageError(
                f"'all' O mode needs |G| <= {ALL_O_MAX_ORDER}; {group.spec} has order {group.order}, pass --subgroup-O"
            )
        return enumerate_subgroups(group)
    specs = [spec] if isinstance(spec, str) else list(spec)
    out = []
    for s in specs:
        o = parse_subgroup(group, s)
        if o not in out:
            out.append(o)
    return sorted(out, key=lambda o: o.sort_key())


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        f = float(value)
        return f if math.isfinite(f) else repr(f)
    if isinstance(value, (complex, np.complexfloating)):
        return [_clean(value.real), _clean(value.imag)]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    return value


def dumps(document: dict) -> str:
    """Canonical serialisation; floats use shortest round-trip repr."""
    return json.dumps(_clean(document), sort_keys=True, indent=1, allow_nan=False) + "\n"


def run_audit(cfg: RunConfig) -> RunResult:
    """Run the selected suites. Raises :class:`UsageError` or ``GroupError`` on bad input."""
    group = construct_group(cfg.group)
    suites = cfg.selected_suites()
    needs_o = any(s in O_SUITES for s in suites)
    o_list = resolve_O(group, cfg.O) if needs_o else []
    ctx = AuditContext(
        group,
        samples=cfg.samples,
        seed=cfg.seed,
        tol_alg=cfg.tol_alg,
        tol_norm=cfg.tol_norm,
        normalizer_filter=cfg.normalizer_filter,
    )
    reports = run_group_suites(ctx, [s for s in suites if s in GROUP_SUITES])
    for o in o_list:
        reports += run_o_suites(ctx, o, suites)
    ok = all(r.ok for r in reports)
    doc = {
        "group": group.spec,
        "order": group.order,
        "O": [list(o.elements) for o in o_list],
        "O_labels": [[group.labels[x] for x in o.elements] for o in o_list],
        "config": cfg.as_json(),
        "suites": [r.as_json() for r in reports],
        "verdict": "pass" if ok else "fail",
    }
    return RunResult(EXIT_OK if ok else EXIT_VIOLATION, doc, reports)


def format_text(doc: dict) -> str:
    lines = [f"group {doc['group']} (order {doc['order']})"]
    for s in doc["suites"]:
        o = f" O={s['O']}" if "O" in s else ""
        failed = s["cases"] - s["passed"]
        if failed == 0:
            status = "ok"
        elif s["expected"] == "probe":
            status = "probe-fail"
        else:
            status = "FAIL"
        lines.append(
            f"{status:10s} {s['name']}/{s['stratum']}{o} "
            f"{s['passed']}/{s['cases']} max={float(s['max_violation']):.3e} [{s['expected']}]"
        )
    lines.append(f"verdict: {doc['verdict']}")
    return "\n".join(lines) + "\n"
