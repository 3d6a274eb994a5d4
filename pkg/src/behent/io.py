"""CSV / NDJSON readers and writers for datasets and result tables.

CSV: comma separated, ``\\n`` line endings, UTF-8 without BOM. Dataset
columns are ``s0..s{d-1}`` plus optional ``a0..``, ``episode``, ``step`` and
``reward``. NDJSON: one object per row with ``state``, ``action``,
``reward``, ``episode`` and ``step`` keys. Floats are written with Python's
shortest round-trip ``repr``.
"""

from __future__ import annotations

import csv
import json
import math
import re
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .density import Dataset
from .errors import DatasetIOError, ValidationError

FORMATS = ("csv", "ndjson")
_STATE = re.compile(r"^s(\d+)$")
_ACTION = re.compile(r"^a(\d+)$")


def infer_format(path, fmt: Optional[str] = None) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise ValidationError(f"unknown format {fmt!r}; choose from {FORMATS}", "io")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix in (".ndjson", ".jsonl"):
        return "ndjson"
    return "csv"


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_float(x)
    return str(x)


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a CSV table to ``path``, or to stdout when ``path`` is None or ``-``."""
    if path is None or str(path) == "-":
        _write_csv(sys.stdout, header, rows)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _write_csv(fh, header, rows)
    except OSError as exc:
        raise DatasetIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_csv(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(x) for x in row])


def _indexed_columns(header, pattern, kind):
    found = {}
    for pos, name in enumerate(header):
        m = pattern.match(name)
        if m:
            found[int(m.group(1))] = pos
    if found and sorted(found) != list(range(len(found))):
        raise DatasetIOError(f"{kind} columns must be numbered contiguously from 0", line=1)
    return [found[i] for i in range(len(found))]


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetIOError(f"line {line}: column {column!r}: cannot parse {text!r} as a number",
                             line=line) from None
    return value


def _finite_rows(states: np.ndarray, first_line: int):
    bad = np.flatnonzero(~np.isfinite(states).all(axis=1))
    if bad.size:
        raise ValidationError(
            f"non-finite value in row {int(bad[0])} (line {int(bad[0]) + first_line})", "io")


def _load_csv(path) -> Dataset:
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetIOError(f"{path} is empty", line=1) from None
        s_cols = _indexed_columns(header, _STATE, "state")
        if not s_cols:
            raise DatasetIOError("CSV header names no state columns s0..", line=1)
        a_cols = _indexed_columns(header, _ACTION, "action")
        extra = {name: header.index(name) for name in ("episode", "step", "reward") if name in header}
        states, actions, meta = [], [], {name: [] for name in extra}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetIOError(f"line {line}: expected {len(header)} fields, got {len(row)}",
                                     line=line)
            states.append([_parse_float(row[p], line, header[p]) for p in s_cols])
            actions.append([_parse_float(row[p], line, header[p]) for p in a_cols])
            for name, p in extra.items():
                meta[name].append(_parse_float(row[p], line, name))
    states_arr = np.asarray(states, dtype=float).reshape(len(states), len(s_cols))
    _finite_rows(states_arr, 2)
    return _build(states_arr, np.asarray(actions, dtype=float) if a_cols else None, meta)


def _build(states, actions, meta) -> Dataset:
    kw = {}
    for name in ("episode", "step"):
        if name in meta:
            vals = np.asarray(meta[name], dtype=float)
            if not np.all(vals == np.round(vals)):
                raise ValidationError(f"{name} column must hold integers", "io")
            kw[name] = vals.astype(np.int64)
    if "reward" in meta:
        kw["reward"] = np.asarray(meta["reward"], dtype=float)
    if actions is not None and not np.isfinite(actions).all():
        raise ValidationError("non-finite action values", "io")
    return Dataset(states, actions=actions, **kw)


def _load_ndjson(path) -> Dataset:
    states, actions, meta = [], [], {"episode": [], "step": [], "reward": []}
    has = {"action": None, "episode": None, "step": None, "reward": None}
    with open(path, encoding="utf-8") as fh:
        for line, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DatasetIOError(f"line {line}: invalid JSON: {exc.msg}", line=line) from None
            if not isinstance(obj, dict) or "state" not in obj:
                raise DatasetIOError(f"line {line}: record without a 'state' array", line=line)
            state = obj["state"]
            if not isinstance(state, list) or not state:
                raise DatasetIOError(f"line {line}: 'state' must be a nonempty array", line=line)
            if states and len(state) != len(states[0]):
                raise DatasetIOError(
                    f"line {line}: state has dimension {len(state)}, expected {len(states[0])}", line=line)
            try:
                states.append([float(v) for v in state])
            except (TypeError, ValueError):
                raise DatasetIOError(f"line {line}: non-numeric state entry", line=line) from None
            for key in has:
                present = obj.get(key) is not None
                if has[key] is None:
                    has[key] = present
                elif has[key] != present:
                    raise DatasetIOError(f"line {line}: field {key!r} present on some rows only", line=line)
            if has["action"]:
                actions.append([float(v) for v in obj["action"]])
            for key in ("episode", "step", "reward"):
                if has[key]:
                    meta[key].append(float(obj[key]))
    if not states:
        raise DatasetIOError(f"{path} holds no records", line=1)
    states_arr = np.asarray(states, dtype=float)
    _finite_rows(states_arr, 1)
    meta = {k: v for k, v in meta.items() if has[k]}
    return _build(states_arr, np.asarray(actions, dtype=float) if has["action"] else None, meta)


def load_dataset(path, fmt: Optional[str] = None) -> Dataset:
    fmt = infer_format(path, fmt)
    if not Path(path).is_file():
        raise DatasetIOError(f"no such file: {path}")
    try:
        return _load_csv(path) if fmt == "csv" else _load_ndjson(path)
    except UnicodeDecodeError as exc:
        raise DatasetIOError(f"{path} is not valid UTF-8: {exc.reason}") from None


def _record_dict(state, action, reward, episode, step) -> dict:
    return {
        "state": [float(v) for v in state],
        "action": None if action is None else [float(v) for v in action],
        "reward": None if reward is None else float(reward),
        "episode": None if episode is None else int(episode),
        "step": None if step is None else int(step),
    }


def _dataset_rows(data: Dataset, rewards=None):
    rewards = data.reward if rewards is None else rewards
    for i in range(data.n):
        yield (
            data.points[i],
            None if data.actions is None else data.actions[i],
            None if rewards is None else rewards[i],
            None if data.episode is None else data.episode[i],
            None if data.step is None else data.step[i],
        )


def _write_rows(path, rows, d: int, a: int, fmt: str, with_reward: bool, with_ep: bool, with_step: bool):
    try:
        if fmt == "ndjson":
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                for row in rows:
                    fh.write(json.dumps(_record_dict(*row), allow_nan=False) + "\n")
            return
        header = [f"s{i}" for i in range(d)] + [f"a{i}" for i in range(a)]
        header += [name for name, on in (("episode", with_ep), ("step", with_step),
                                          ("reward", with_reward)) if on]

        def flat():
            for state, action, reward, episode, step in rows:
                out = list(state) + ([] if action is None else list(action))
                if with_ep:
                    out.append(episode)
                if with_step:
                    out.append(step)
                if with_reward:
                    out.append(reward)
                yield out

        write_table(path, header, flat())
    except (OSError, ValueError) as exc:
        if isinstance(exc, DatasetIOError):
            raise
        raise DatasetIOError(f"cannot write {path}: {exc}") from exc


def write_dataset(path, data: Dataset, fmt: Optional[str] = None, rewards=None) -> None:
    fmt = infer_format(path, fmt)
    a = 0 if data.actions is None else data.actions.shape[1]
    has_reward = rewards is not None or data.reward is not None
    _write_rows(path, _dataset_rows(data, rewards), data.d, a, fmt, has_reward,
                data.episode is not None, data.step is not None)


def write_records(path, records: Sequence, fmt: Optional[str] = None) -> None:
    """Write relabeled transition records."""
    fmt = infer_format(path, fmt)
    if not records:
        raise DatasetIOError("no records to write")
    first = records[0]
    rows = [(r.state, r.action, r.reward, r.episode, r.step) for r in records]
    a = 0 if first.action is None else len(first.action)
    _write_rows(path, rows, len(first.state), a, fmt, True,
                first.episode is not None, first.step is not None)
