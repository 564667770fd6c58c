"""Configuration spaces and per-environment performance tables.

Plans are encoded in mixed radix with the last option varying fastest, so a
performance vector reshaped to ``space.shape`` is an n-dimensional grid with
one axis per option.
"""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .errors import DomainError, FormatError, IncompletenessError, ParseError

DELIMITERS = ",;\t"
MAX_LISTED_MISSING = 10


@dataclass(frozen=True)
class OptionDomain:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise DomainError(f"option {self.name!r} has an empty domain")
        if len(set(self.values)) != len(self.values):
            raise DomainError(f"option {self.name!r} has duplicate value labels")

    def __len__(self) -> int:
        return len(self.values)

    def index(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise DomainError(f"value {label!r} is not in the domain of option {self.name!r}") from None


@dataclass(frozen=True)
class ConfigurationSpace:
    """Ordered adaptation options; the Cartesian product of their domains."""

    options: tuple[OptionDomain, ...]
    shape: tuple[int, ...] = field(init=False)
    strides: tuple[int, ...] = field(init=False)
    size: int = field(init=False)

    def __post_init__(self):
        options = tuple(self.options)
        names = [o.name for o in options]
        if len(set(names)) != len(names):
            raise DomainError("option names must be unique within a space")
        shape = tuple(len(o) for o in options)
        strides = []
        acc = 1
        for m in reversed(shape):
            strides.append(acc)
            acc *= m
        object.__setattr__(self, "options", options)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "strides", tuple(reversed(strides)))
        object.__setattr__(self, "size", math.prod(shape))

    @classmethod
    def from_domains(cls, domains: Mapping[str, Sequence] | Sequence[tuple[str, Sequence]]):
        items = domains.items() if isinstance(domains, Mapping) else domains
        return cls(tuple(OptionDomain(name, tuple(str(v) for v in vals)) for name, vals in items))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]):
        """Anonymous space with options ``o0, o1, ...`` and integer labels."""
        return cls(tuple(OptionDomain(f"o{i}", tuple(str(v) for v in range(m))) for i, m in enumerate(sizes)))

    @property
    def n_options(self) -> int:
        return len(self.options)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.options)

    @property
    def neighbor_count(self) -> int:
        return sum(m - 1 for m in self.shape)

    def option_position(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(
                f"unknown option {name!r}; valid options: {', '.join(self.names)}"
            ) from None

    def check_plan(self, plan: Sequence[int]) -> tuple[int, ...]:
        plan = tuple(int(v) for v in plan)
        if len(plan) != self.n_options:
            raise DomainError(f"plan has {len(plan)} values, space has {self.n_options} options")
        for v, m, opt in zip(plan, self.shape, self.options):
            if not 0 <= v < m:
                raise DomainError(f"value index {v} out of range for option {opt.name!r} (size {m})")
        return plan

    def plan_to_index(self, plan: Sequence[int]) -> int:
        plan = self.check_plan(plan)
        return sum(v * s for v, s in zip(plan, self.strides))

    def index_to_plan(self, index: int) -> tuple[int, ...]:
        index = int(index)
        if not 0 <= index < self.size:
            raise DomainError(f"plan index {index} outside [0, {self.size})")
        return tuple((index // s) % m for s, m in zip(self.strides, self.shape))

    def codes(self) -> np.ndarray:
        """All plans as a ``(size, n_options)`` array of value indices, in index order."""
        idx = np.arange(self.size)
        return np.stack([(idx // s) % m for s, m in zip(self.strides, self.shape)], axis=1) \
            if self.n_options else np.zeros((self.size, 0), dtype=int)

    def labels(self, plan: Sequence[int]) -> tuple[str, ...]:
        return tuple(o.values[v] for o, v in zip(self.options, self.check_plan(plan)))

    def neighbor_indices(self, index: int) -> list[int]:
        """Indices of all plans differing from ``index`` in exactly one option."""
        plan = self.index_to_plan(index)
        out = []
        for v, s, m in zip(plan, self.strides, self.shape):
            base = index - v * s
            out.extend(base + w * s for w in range(m) if w != v)
        return out


@dataclass(frozen=True, eq=False)
class EnvironmentLandscape:
    """One environment's performance over a space (lower is better).

    In partial mode ``performance`` holds NaN for plans that were never
    measured and every downstream definition is restricted to measured plans.
    """

    environment_id: str
    space: ConfigurationSpace
    performance: np.ndarray
    measured_count: int
    duplicate_count: int = 0
    partial: bool = False
    measured: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        perf = np.array(self.performance, dtype=float)
        if perf.shape != (self.space.size,):
            raise DomainError(f"performance vector length {perf.shape} != space size {self.space.size}")
        measured = ~np.isnan(perf)
        if np.isinf(perf).any():
            raise DomainError("performance values must be finite")
        if not self.partial and not measured.all():
            raise IncompletenessError(self.environment_id, self.space.size, int(measured.sum()),
                                      [self.space.labels(self.space.index_to_plan(i))
                                       for i in np.flatnonzero(~measured)[:MAX_LISTED_MISSING]])
        perf.setflags(write=False)
        measured.setflags(write=False)
        object.__setattr__(self, "performance", perf)
        object.__setattr__(self, "measured", measured)
        object.__setattr__(self, "measured_count", int(measured.sum()))

    @classmethod
    def from_values(cls, values: Sequence[float], space: ConfigurationSpace | None = None,
                    environment_id: str = "env", shape: Sequence[int] | None = None):
        """Complete landscape from a performance vector in plan-index order."""
        if space is None:
            if shape is None:
                n = len(values).bit_length() - 1
                if len(values) != 1 << n:
                    raise DomainError("give a space or shape for a non-power-of-two vector")
                shape = [2] * n
            space = ConfigurationSpace.from_sizes(shape)
        return cls(environment_id, space, np.asarray(values, dtype=float), len(values))

    def grid(self) -> np.ndarray:
        return self.performance.reshape(self.space.shape)

    def with_performance(self, values: np.ndarray, environment_id: str | None = None):
        return EnvironmentLandscape(environment_id or self.environment_id, self.space, values,
                                    self.measured_count, partial=self.partial)


@dataclass(frozen=True)
class CompletenessReport:
    size: int
    measured_count: int
    missing_count: int
    duplicate_count: int
    missing_plans: tuple[tuple[str, ...], ...]

    @property
    def complete(self) -> bool:
        return self.missing_count == 0


def validate_completeness(landscape: EnvironmentLandscape) -> CompletenessReport:
    missing = np.flatnonzero(~landscape.measured)
    space = landscape.space
    return CompletenessReport(
        size=space.size,
        measured_count=landscape.measured_count,
        missing_count=len(missing),
        duplicate_count=landscape.duplicate_count,
        missing_plans=tuple(space.labels(space.index_to_plan(i)) for i in missing[:MAX_LISTED_MISSING]),
    )


@dataclass(frozen=True)
class RawTable:
    """Parsed rows of one environment file, before a space is attached."""

    option_names: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    performance: tuple[float, ...]
    source_name: str = "<stream>"


def read_table(source: TextIO | str, perf_col: str = "performance",
               ignore_cols: Iterable[str] = (), delimiter: str | None = None,
               source_name: str | None = None) -> RawTable:
    """Parse a delimited text table with a header row.

    ``delimiter`` is sniffed among comma, semicolon and tab when not given.
    """
    text = source if isinstance(source, str) else source.read()
    name = source_name or getattr(source, "name", "<stream>")
    if text.startswith("﻿"):
        text = text[1:]
    if not text.strip():
        raise FormatError(f"{name}: empty input")
    if delimiter is None:
        header_line = text.splitlines()[0]
        try:
            delimiter = csv.Sniffer().sniff(header_line, delimiters=DELIMITERS).delimiter
        except csv.Error:
            delimiter = ","
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    if perf_col not in header:
        raise FormatError(f"{name}: performance column {perf_col!r} not found in header {header}")
    ignored = set(ignore_cols)
    unknown = ignored - set(header)
    if unknown:
        raise FormatError(f"{name}: ignored columns not in header: {sorted(unknown)}")
    perf_pos = header.index(perf_col)
    opt_pos = [i for i, h in enumerate(header) if i != perf_pos and h not in ignored]
    rows, perf = [], []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"{name}: row {line_no} has {len(row)} columns, header has {len(header)}")
        cell = row[perf_pos].strip()
        try:
            value = float(cell)
        except ValueError:
            raise ParseError(f"{name}: row {line_no}: non-numeric performance {cell!r}") from None
        if not math.isfinite(value):
            raise ParseError(f"{name}: row {line_no}: non-finite performance {cell!r}")
        rows.append(tuple(row[i].strip() for i in opt_pos))
        perf.append(value)
    return RawTable(tuple(header[i] for i in opt_pos), tuple(rows), tuple(perf), name)


def infer_space(tables: Sequence[RawTable],
                domains: Mapping[str, Sequence[str]] | None = None) -> ConfigurationSpace:
    """Domains from the distinct labels per column, in order of first appearance.

    Explicit ``domains`` override inference for the options they name.
    """
    names = tables[0].option_names
    for t in tables[1:]:
        if t.option_names != names:
            raise FormatError(f"{t.source_name}: option columns {t.option_names} differ from {names}")
    domains = dict(domains or {})
    unknown = set(domains) - set(names)
    if unknown:
        raise DomainError(f"explicit domains name unknown options: {sorted(unknown)}")
    seen: list[dict[str, None]] = [{} for _ in names]
    for t in tables:
        for row in t.rows:
            for j, label in enumerate(row):
                seen[j].setdefault(label, None)
    opts = []
    for j, name in enumerate(names):
        if name in domains:
            values = tuple(str(v) for v in domains[name])
            extra = [v for v in seen[j] if v not in values]
            if extra:
                raise DomainError(f"option {name!r}: labels {extra[:5]} not in its explicit domain")
        else:
            values = tuple(seen[j])
        opts.append(OptionDomain(name, values))
    return ConfigurationSpace(tuple(opts))


def build_landscape(table: RawTable, space: ConfigurationSpace, environment_id: str,
                    aggregation: str = "mean", partial: bool = False) -> EnvironmentLandscape:
    if aggregation not in ("mean", "median"):
        raise ValueError(f"aggregation must be 'mean' or 'median', got {aggregation!r}")
    lookup = [{label: k for k, label in enumerate(o.values)} for o in space.options]
    buckets: dict[int, list[float]] = defaultdict(list)
    for row, value in zip(table.rows, table.performance):
        try:
            idx = sum(lookup[j][label] * s for j, (label, s) in enumerate(zip(row, space.strides)))
        except KeyError as exc:
            raise DomainError(f"{table.source_name}: label {exc.args[0]!r} outside the space") from None
        buckets[idx].append(value)
    perf = np.full(space.size, np.nan)
    duplicates = 0
    agg = np.mean if aggregation == "mean" else np.median
    for idx in sorted(buckets):
        vals = buckets[idx]
        duplicates += len(vals) - 1
        perf[idx] = vals[0] if len(vals) == 1 else float(agg(vals))
    return EnvironmentLandscape(environment_id, space, perf, len(buckets),
                                duplicate_count=duplicates, partial=partial)


def load_environment(source: TextIO | str, environment_id: str = "env", perf_col: str = "performance",
                     aggregation: str = "mean", ignore_cols: Iterable[str] = (),
                     delimiter: str | None = None, domains: Mapping[str, Sequence[str]] | None = None,
                     space: ConfigurationSpace | None = None, partial: bool = False) -> EnvironmentLandscape:
    """Load one environment's table into a landscape.

    Raises ``IncompletenessError`` when plans are missing, unless ``partial``.
    """
    table = read_table(source, perf_col, ignore_cols, delimiter)
    if space is None:
        space = infer_space([table], domains)
    elif table.option_names != space.names:
        raise FormatError(f"{table.source_name}: option columns {table.option_names} differ from {space.names}")
    return build_landscape(table, space, environment_id, aggregation, partial)


def load_study(paths: Mapping[str, str], perf_col: str = "performance", aggregation: str = "mean",
               ignore_cols: Iterable[str] = (), delimiter: str | None = None,
               domains: Mapping[str, Sequence[str]] | None = None,
               partial: bool = False) -> list[EnvironmentLandscape]:
    """Load several environment files onto one shared, jointly inferred space."""
    tables = []
    for env_id, path in paths.items():
        with open(path, encoding="utf-8", newline="") as fh:
            tables.append(read_table(fh, perf_col, ignore_cols, delimiter, source_name=str(path)))
    space = infer_space(tables, domains)
    return [build_landscape(t, space, env_id, aggregation, partial) for env_id, t in zip(paths, tables)]
