"""Corpus loading: sources, tests, bug reports and ground-truth faults."""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import DanglingLink, FaultInjectorError, MalformedReport
from .minij.nodes import FuncDecl, Path as NodePath, SourceUnit, Stmt, get_at, statement_paths
from .minij.parser import parse
from .minij.runner import test_names

logger = logging.getLogger(__name__)

RESOLVED_STATUSES = frozenset({"resolved", "fixed", "closed"})


class ReportStatus(str, Enum):
    RESOLVED = "resolved"
    FIXED = "fixed"
    CLOSED = "closed"
    OTHER = "other"


class BugReport(BaseModel):
    """A natural-language bug report, optionally linked to a ground-truth fault."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    id: str = Field(..., min_length=1, description="Report identifier, unique in the corpus")
    title: str = Field(..., description="Summary line")
    description: str = Field(..., description="Report body")
    status: ReportStatus = Field(..., description="Tracker status")
    linked_fault_id: Optional[str] = Field(None, description="Ground-truth fault described by the report")

    @field_validator("status", mode="before")
    @classmethod
    def _known_status(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = value.strip().lower()
            if value not in {s.value for s in ReportStatus}:
                return ReportStatus.OTHER
        return value

    @model_validator(mode="after")
    def _has_text(self) -> "BugReport":
        if not (self.title.strip() or self.description.strip()):
            raise ValueError("title and description are both empty")
        return self


class StatementRef(BaseModel):
    """Stable statement identity: file path plus ordinal within the file."""

    model_config = ConfigDict(frozen=True)

    file_path: str
    index: int = Field(..., ge=0)
    span: tuple[int, int, int, int]

    def key(self) -> tuple[str, int]:
        return (self.file_path, self.index)

    def pointer(self) -> "StatementPointer":
        return StatementPointer(path=self.file_path, index=self.index)


class StatementPointer(BaseModel):
    """Serialized statement reference, as written in fault records and mutant metadata."""

    model_config = ConfigDict(frozen=True)

    path: str
    index: int = Field(..., ge=0)


class FaultRecord(BaseModel):
    """On-disk form of a ground-truth fault."""

    fault_id: str = Field(..., min_length=1)
    bug_report_id: str = Field(..., min_length=1)
    fixed_statements: list[StatementPointer] = Field(..., min_length=1)
    failing_tests: list[str] = Field(..., min_length=1)


class GroundTruthFault(BaseModel):
    model_config = ConfigDict(frozen=True)

    fault_id: str
    bug_report_id: str
    fixed_statements: tuple[StatementRef, ...]
    failing_tests: frozenset[str] = Field(..., min_length=1)

    @property
    def fixed_files(self) -> frozenset[str]:
        return frozenset(s.file_path for s in self.fixed_statements)


@dataclass(frozen=True)
class SourceFile:
    """A parsed MiniJ file with its statements indexed in source order."""

    path: str
    raw_text: str
    unit: SourceUnit
    statements: tuple[StatementRef, ...]
    statement_paths: tuple[NodePath, ...]

    @classmethod
    def from_text(cls, path: str, text: str) -> "SourceFile":
        unit = parse(text, path)
        paths = tuple(statement_paths(unit))
        refs = tuple(
            StatementRef(file_path=path, index=i, span=get_at(unit, p).span.as_tuple())
            for i, p in enumerate(paths)
        )
        return cls(path, text, unit, refs, paths)

    def statement(self, index: int) -> Stmt:
        return get_at(self.unit, self.statement_paths[index])

    def function_of(self, index: int) -> FuncDecl:
        return get_at(self.unit, self.statement_paths[index][:1])


@dataclass(frozen=True)
class Corpus:
    """Immutable in-memory model of one project."""

    root: str
    name: str
    sources: tuple[SourceFile, ...]
    test_files: tuple[SourceFile, ...]
    reports: tuple[BugReport, ...]
    faults: tuple[GroundTruthFault, ...]

    @cached_property
    def _sources_by_path(self) -> dict[str, SourceFile]:
        return {f.path: f for f in self.sources + self.test_files}

    @cached_property
    def tests(self) -> tuple[str, ...]:
        return tuple(test_names(f.unit for f in self.test_files))

    def source(self, path: str) -> SourceFile:
        try:
            return self._sources_by_path[path]
        except KeyError:
            raise FaultInjectorError(f"{self.name}: no source file {path!r}") from None

    def report(self, report_id: str) -> BugReport:
        for report in self.reports:
            if report.id == report_id:
                return report
        raise FaultInjectorError(f"{self.name}: unknown bug report {report_id!r}")

    def fault(self, fault_id: str) -> GroundTruthFault:
        for fault in self.faults:
            if fault.fault_id == fault_id:
                return fault
        raise FaultInjectorError(f"{self.name}: unknown fault {fault_id!r}")

    def find_fault(self, report: BugReport) -> Optional[GroundTruthFault]:
        return self.fault(report.linked_fault_id) if report.linked_fault_id else None

    def statement_refs(self) -> list[StatementRef]:
        return [ref for f in self.sources for ref in f.statements]

    def program(self, replace: Optional[SourceFile] = None) -> list[tuple[str, SourceUnit]]:
        """Sources then test files as ``(path, unit)``, optionally with one file swapped."""
        units = []
        for f in self.sources + self.test_files:
            if replace is not None and f.path == replace.path:
                f = replace
            units.append((f.path, f.unit))
        return units


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise MalformedReport(f"{path}: invalid JSON: {e}") from e


def _load_sources(root: Path, sub: str) -> tuple[SourceFile, ...]:
    base = root / sub
    files = sorted(base.rglob("*.mj"), key=lambda p: p.relative_to(root).as_posix())
    return tuple(
        SourceFile.from_text(p.relative_to(root).as_posix(), p.read_text(encoding="utf-8")) for p in files
    )


def _load_reports(root: Path) -> tuple[BugReport, ...]:
    reports: dict[str, BugReport] = {}
    for path in sorted((root / "bugreports").glob("*.json")):
        try:
            report = BugReport.model_validate(_read_json(path))
        except ValidationError as e:
            raise MalformedReport(f"{path}: {e}") from e
        if report.id in reports:
            raise MalformedReport(f"{path}: duplicate report id {report.id!r}")
        reports[report.id] = report
    return tuple(sorted(reports.values(), key=lambda r: r.id))


def _resolve_fault(
    path: Path, record: FaultRecord, files: dict[str, SourceFile], tests: set[str], report_ids: set[str]
) -> GroundTruthFault:
    if record.bug_report_id not in report_ids:
        raise DanglingLink(f"{path}: fault {record.fault_id} names missing report {record.bug_report_id!r}")
    refs = []
    for pointer in record.fixed_statements:
        source = files.get(pointer.path)
        if source is None:
            raise MalformedReport(f"{path}: fixed statement in unknown file {pointer.path!r}")
        if pointer.index >= len(source.statements):
            raise MalformedReport(f"{path}: {pointer.path} has no statement {pointer.index}")
        refs.append(source.statements[pointer.index])
    unknown = sorted(set(record.failing_tests) - tests)
    if unknown:
        raise MalformedReport(f"{path}: unknown failing tests {', '.join(unknown)}")
    return GroundTruthFault(
        fault_id=record.fault_id,
        bug_report_id=record.bug_report_id,
        fixed_statements=tuple(refs),
        failing_tests=frozenset(record.failing_tests),
    )


def load_corpus(root: Path) -> Corpus:
    """
    Load and validate one corpus directory.

    Raises:
        MalformedReport: a report or fault file violates its schema
        ParseError: a MiniJ file does not parse
        DanglingLink: a report links to a fault, or a fault to a report, that does not exist
    """
    root = Path(root)
    for sub in ("src", "tests", "bugreports"):
        if not (root / sub).is_dir():
            raise FaultInjectorError(f"{root}: missing {sub}/ directory")

    sources = _load_sources(root, "src")
    test_files = _load_sources(root, "tests")
    reports = _load_reports(root)

    files = {f.path: f for f in sources}
    tests = set(test_names(f.unit for f in test_files))
    report_ids = {r.id for r in reports}
    faults: dict[str, GroundTruthFault] = {}
    fault_dir = root / "faults"
    if fault_dir.is_dir():
        for path in sorted(fault_dir.glob("*.json")):
            try:
                record = FaultRecord.model_validate(_read_json(path))
            except ValidationError as e:
                raise MalformedReport(f"{path}: {e}") from e
            if record.fault_id in faults:
                raise MalformedReport(f"{path}: duplicate fault id {record.fault_id!r}")
            faults[record.fault_id] = _resolve_fault(path, record, files, tests, report_ids)

    for report in reports:
        if report.linked_fault_id and report.linked_fault_id not in faults:
            raise DanglingLink(f"report {report.id} links to missing fault {report.linked_fault_id!r}")

    corpus = Corpus(
        root=root.as_posix(),
        name=root.name,
        sources=sources,
        test_files=test_files,
        reports=reports,
        faults=tuple(faults[k] for k in sorted(faults)),
    )
    logger.info(
        f"Loaded corpus {corpus.name}: {len(sources)} source files, "
        f"{len(corpus.tests)} tests, {len(reports)} reports, {len(faults)} faults"
    )
    return corpus


def load_corpus_collection(root: Path) -> list[Corpus]:
    """Load ``root`` as one corpus, or every corpus sub-directory of it."""
    root = Path(root)
    if not root.is_dir():
        raise FaultInjectorError(f"corpus root not found: {root}")
    if (root / "src").is_dir():
        corpora = [load_corpus(root)]
    else:
        corpora = [load_corpus(d) for d in sorted(root.iterdir()) if d.is_dir() and (d / "src").is_dir()]
        if not corpora:
            raise FaultInjectorError(f"{root}: no corpus found")
    seen: dict[str, str] = {}
    for corpus in corpora:
        for report in corpus.reports:
            if report.id in seen:
                raise MalformedReport(f"report id {report.id!r} appears in {seen[report.id]} and {corpus.name}")
            seen[report.id] = corpus.name
    return corpora


def filter_reports(corpus: Corpus, statuses: Iterable[str]) -> list[BugReport]:
    """Reports whose status is in ``statuses``, in id order."""
    try:
        wanted = {ReportStatus(s) for s in statuses}
    except ValueError as e:
        raise FaultInjectorError(f"unknown report status: {e}") from e
    return [r for r in sorted(corpus.reports, key=lambda r: r.id) if r.status in wanted]


def find_report(corpora: Iterable[Corpus], report_id: str) -> tuple[Corpus, BugReport]:
    for corpus in corpora:
        for report in corpus.reports:
            if report.id == report_id:
                return corpus, report
    raise FaultInjectorError(f"unknown bug report {report_id!r}")
