"""On-disk layout of injected mutants.

    {out}/{group}/{mutant_id}/
        <relative path of the mutated file>
        diff.patch
        meta.json

``group`` is the bug report id, or the project name for a baseline run
without a report.
"""

import logging
import shutil
from pathlib import Path, PurePosixPath
from typing import Iterable, Optional

from pydantic import ValidationError

from .errors import CorruptMutant
from .injector import Mutant, MutantSource

logger = logging.getLogger(__name__)

META_FILE = "meta.json"
DIFF_FILE = "diff.patch"


def _checked_relative(path: str) -> PurePosixPath:
    relative = PurePosixPath(path)
    if relative.is_absolute() or ".." in relative.parts or not relative.parts:
        raise CorruptMutant(f"mutated file path {path!r} escapes the mutant directory")
    return relative


def clear_mutants(group_dir: Path, source: MutantSource) -> int:
    """Remove previously written mutants of one source; returns how many were removed."""
    if not group_dir.is_dir():
        return 0
    removed = 0
    for child in sorted(group_dir.glob(f"{source.value}-*")):
        if child.is_dir():
            shutil.rmtree(child)
            removed += 1
    return removed


def write_mutants(out_dir: Path, group: str, mutants: Iterable[Mutant]) -> Path:
    group_dir = Path(out_dir) / group
    written = 0
    for mutant in mutants:
        target = group_dir / mutant.mutant_id
        mutated = target / _checked_relative(mutant.path)
        mutated.parent.mkdir(parents=True, exist_ok=True)
        mutated.write_text(mutant.mutated_source, encoding="utf-8")
        (target / DIFF_FILE).write_text(mutant.diff, encoding="utf-8")
        (target / META_FILE).write_text(mutant.model_dump_json(indent=2) + "\n", encoding="utf-8")
        written += 1
    logger.info(f"Wrote {written} mutants to {group_dir}")
    return group_dir


def read_mutant(mutant_dir: Path) -> Mutant:
    meta = mutant_dir / META_FILE
    try:
        mutant = Mutant.model_validate_json(meta.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorruptMutant(f"{mutant_dir}: missing {META_FILE}") from None
    except (ValidationError, UnicodeDecodeError) as e:
        raise CorruptMutant(f"{meta}: invalid mutant metadata: {e}") from e
    if mutant.mutant_id != mutant_dir.name:
        raise CorruptMutant(f"{meta}: mutant_id {mutant.mutant_id!r} does not match its directory")
    try:
        text = (mutant_dir / _checked_relative(mutant.path)).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CorruptMutant(f"{mutant_dir}: mutated file {mutant.path} is missing") from None
    return mutant.model_copy(update={"mutated_source": text})


def read_mutants(group_dir: Path, source: Optional[MutantSource] = None) -> list[Mutant]:
    """Mutants stored under ``group_dir``, optionally of one source, in rank order."""
    if not group_dir.is_dir():
        return []
    pattern = f"{source.value}-*" if source is not None else "*"
    mutants = [read_mutant(child) for child in sorted(group_dir.glob(pattern)) if child.is_dir()]
    return sorted(mutants, key=lambda m: (m.source.value, m.rank))
