"""Instance CSV and plan text files.

Instance file::

    # pdp d=<d> n=<n>
    s_1,...,s_d,t_1,...,t_d        (one row per request)

Plan file: one action per line, ``P <i>``, ``D <i>`` or ``M <x_1> ... <x_d>``,
request indices 1-based.
"""

from __future__ import annotations

import re
import warnings
from pathlib import Path

import numpy as np

from .core import Instance, Kind, Plan

_HEADER = re.compile(r"#\s*pdp\s+d=(\d+)\s+n=(\d+)\s*$")


class FormatError(ValueError):
    pass


def format_instance(inst: Instance) -> str:
    lines = [f"# pdp d={inst.d} n={inst.n}"]
    for s, t in zip(inst.origins.tolist(), inst.destinations.tolist()):
        lines.append(",".join(repr(x) for x in s + t))
    return "\n".join(lines) + "\n"


def parse_instance(text: str, check_cube: bool = True) -> Instance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty instance file")
    m = _HEADER.match(lines[0])
    if not m:
        raise FormatError(f"bad header line: {lines[0]!r}")
    d, n = int(m.group(1)), int(m.group(2))
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if ln.startswith("#"):
            continue
        try:
            vals = [float(x) for x in ln.split(",")]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if len(vals) != 2 * d:
            raise FormatError(f"line {lineno}: expected {2 * d} values, got {len(vals)}")
        rows.append(vals)
    if len(rows) != n:
        raise FormatError(f"header says n={n} but found {len(rows)} rows")
    arr = np.array(rows, dtype=np.float64).reshape(n, 2 * d)
    inst = Instance(arr[:, :d], arr[:, d:])
    if check_cube and not inst.in_unit_cube():
        warnings.warn("instance has coordinates outside [0,1]^d", stacklevel=2)
    return inst


def read_instance(path, check_cube: bool = True) -> Instance:
    return parse_instance(Path(path).read_text(), check_cube)


def write_instance(path, inst: Instance) -> None:
    Path(path).write_text(format_instance(inst))


def format_plan(plan: Plan) -> str:
    lines = []
    for k, r in zip(plan.kinds.tolist(), plan.refs.tolist()):
        if k == Kind.PICKUP:
            lines.append(f"P {r + 1}")
        elif k == Kind.DELIVER:
            lines.append(f"D {r + 1}")
        else:
            lines.append("M " + " ".join(repr(x) for x in plan.move_points[r].tolist()))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_plan(text: str, capacity: int) -> Plan:
    kinds, refs, moves = [], [], []
    for lineno, ln in enumerate(text.splitlines(), start=1):
        parts = ln.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0].upper()
        try:
            if tag in ("P", "D"):
                if len(parts) != 2:
                    raise FormatError(f"line {lineno}: expected '{tag} <index>'")
                kinds.append(Kind.PICKUP if tag == "P" else Kind.DELIVER)
                refs.append(int(parts[1]) - 1)
            elif tag == "M":
                kinds.append(Kind.MOVE)
                refs.append(len(moves))
                moves.append([float(x) for x in parts[1:]])
            else:
                raise FormatError(f"line {lineno}: unknown action {parts[0]!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from None
    if moves and len({len(m) for m in moves}) != 1:
        raise FormatError("move actions have inconsistent dimensions")
    mp = np.array(moves, dtype=np.float64) if moves else None
    return Plan(np.array(kinds, dtype=np.int8), np.array(refs, dtype=np.intp), capacity, mp)


def read_plan(path, capacity: int) -> Plan:
    return parse_plan(Path(path).read_text(), capacity)


def write_plan(path, plan: Plan) -> None:
    Path(path).write_text(format_plan(plan))
