"""Scenario documents and result files.

A scenario is a JSON object::

    {
      "initial_utility": {"kind": "power", "theta": 2.0},
      "initial_wealth": 1.0,
      "periods": [{"u": 1.2, "d": 0.9, "p": 0.6, "realized": "up"}, ...]
    }

``kind`` is ``"power"``, ``"log"`` or ``"tabulated"``; a tabulated utility
names a ``y,I`` CSV in ``file`` (relative paths resolve against the scenario's
directory) and may set ``anchor_value`` for ``U(1)``.

Every CSV written here has a header row, UTF-8 encoding, ``\\n`` line endings
and floats in shortest round-trip form (``repr``), so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import ParseError, ValidationError
from .forward import ForwardStep, InitialUtility, Outcome, Period, Scenario
from .marginal import MarginalFn, log_grid, write_marginal_csv
from .utility import UtilityFn, write_utility_csv

_TOP_KEYS = {"initial_utility", "initial_wealth", "periods"}
_UTILITY_KEYS = {"kind", "theta", "file", "anchor_value"}
_PERIOD_KEYS = {"u", "d", "p", "realized"}


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{field}: expected a number, got {value!r}", field=field)
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"{field}: expected a finite number", field=field)
    return value


def _object(value, field: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{field}: expected an object", field=field)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ParseError(f"{field}: unknown key {unknown[0]!r}", field=f"{field}.{unknown[0]}")
    missing = sorted(required - set(value))
    if missing:
        raise ParseError(f"{field}: missing key {missing[0]!r}", field=f"{field}.{missing[0]}")
    return value


def scenario_from_dict(doc, base_dir: Path | None = None) -> Scenario:
    doc = _object(doc, "scenario", _TOP_KEYS, _TOP_KEYS)
    iu = _object(doc["initial_utility"], "initial_utility", _UTILITY_KEYS, {"kind"})
    kind = iu["kind"]
    if kind not in ("power", "log", "tabulated"):
        raise ParseError(f"initial_utility.kind: unknown kind {kind!r}", field="initial_utility.kind")
    theta = _number(iu["theta"], "initial_utility.theta") if "theta" in iu else None
    file = iu.get("file")
    if file is not None and not isinstance(file, str):
        raise ParseError("initial_utility.file: expected a string", field="initial_utility.file")
    anchor = _number(iu.get("anchor_value", 0.0), "initial_utility.anchor_value")
    initial = InitialUtility(kind, theta, file, anchor)

    wealth = _number(doc["initial_wealth"], "initial_wealth")
    raw_periods = doc["periods"]
    if not isinstance(raw_periods, list):
        raise ParseError("periods: expected an array", field="periods")
    periods = []
    for i, entry in enumerate(raw_periods):
        name = f"periods[{i}]"
        entry = _object(entry, name, _PERIOD_KEYS, {"u", "d", "p"})
        realized = entry.get("realized")
        if realized is not None:
            if realized not in ("up", "down"):
                raise ParseError(f"{name}.realized: expected 'up' or 'down', got {realized!r}",
                                 field=f"{name}.realized")
            realized = Outcome(realized)
        periods.append(Period(_number(entry["u"], f"{name}.u"), _number(entry["d"], f"{name}.d"),
                              _number(entry["p"], f"{name}.p"), realized))
    return Scenario(initial, wealth, tuple(periods), base_dir)


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file.

    Raises :class:`ParseError` for malformed JSON (with ``line``) or a bad
    field (with ``field``), and :class:`ValidationError` naming the first
    period whose parameters break the market assumptions.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read scenario: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}", line=exc.lineno) from None
    return scenario_from_dict(doc, path.resolve().parent)


def scenario_to_dict(scenario: Scenario) -> dict:
    iu = scenario.initial_utility
    utility: dict = {"kind": iu.kind}
    if iu.theta is not None:
        utility["theta"] = iu.theta
    if iu.file is not None:
        utility["file"] = iu.file
    if iu.anchor_value != 0.0:
        utility["anchor_value"] = iu.anchor_value
    periods = []
    for period in scenario.periods:
        entry: dict = {"u": period.u, "d": period.d, "p": period.p}
        if period.realized is not None:
            entry["realized"] = period.realized.value
        periods.append(entry)
    return {"initial_utility": utility, "initial_wealth": scenario.initial_wealth, "periods": periods}


def save_scenario(scenario: Scenario, path) -> None:
    text = json.dumps(scenario_to_dict(scenario), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_path_csv(path, steps: list[ForwardStep]) -> None:
    """``n, pi_star, X_star, realized`` per period; ``X_star`` is wealth at the
    start of period ``n`` and cells are empty once the path is unknown."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "pi_star", "X_star", "realized"])
        for n, st in enumerate(steps):
            writer.writerow([
                n,
                "" if st.allocation is None else repr(float(st.allocation)),
                "" if st.x is None else repr(float(st.x)),
                "" if st.outcome is None else st.outcome.value,
            ])


def write_marginal_grid(path, fn: MarginalFn, config: RunConfig) -> None:
    ys = log_grid(config.y_min, config.y_max, config.grid_points)
    write_marginal_csv(path, ys, fn(ys))


def write_utility_grid(path, u: UtilityFn, config: RunConfig) -> None:
    xs = log_grid(config.x_min, config.x_max, config.grid_points)
    write_utility_csv(path, xs, u.value(xs), u.marginal(xs))


def write_run(out_dir, scenario: Scenario, steps: list[ForwardStep], config: RunConfig) -> list[Path]:
    """Write ``utility_n.csv`` and ``marginal_n.csv`` for ``n = 0..N`` plus
    ``path.csv``; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if steps:
        utilities = [steps[0].prev_utility] + [st.utility for st in steps]
    else:
        utilities = [scenario.initial_utility.build(config, scenario.base_dir)]
    written = []
    for n, u in enumerate(utilities):
        upath, mpath = out / f"utility_{n}.csv", out / f"marginal_{n}.csv"
        write_utility_grid(upath, u, config)
        write_marginal_grid(mpath, u.inv_marginal, config)
        written += [upath, mpath]
    ppath = out / "path.csv"
    write_path_csv(ppath, steps)
    written.append(ppath)
    return written


def write_table(path, header: list[str], columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    if len({c.size for c in cols}) > 1:
        raise ValidationError("columns must have equal length")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(v)) for v in row])
