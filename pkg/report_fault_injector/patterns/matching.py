"""Breadth-first context matching and recipe application."""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..corpus import StatementRef
from ..errors import NoOpMutant, StaleApplication
from ..minij.nodes import (
    Node,
    Path,
    SourceUnit,
    Stmt,
    get_at,
    iter_children,
    replace_at,
    statement_paths,
    walk_preorder,
)
from ..minij.unparse import splice
from .catalog import Catalog, default_catalog
from .recipes import Donor, Edit, Pattern, Where
from .scope import StatementSite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PatternApplication:
    """A (location, pattern, donor) triple ready to be applied."""

    statement: StatementRef
    node: Path
    pattern_id: str
    donor: Optional[Donor]
    priority: int
    bfs_index: int
    donor_index: int
    target: Node = field(compare=False, repr=False)

    @property
    def donor_label(self) -> Optional[str]:
        return self.donor.label if self.donor is not None else None

    def sort_key(self) -> tuple[int, int, int]:
        return (self.priority, self.bfs_index, self.donor_index)


def candidate_nodes(stmt: Stmt, descend_into_nested: bool = False) -> list[tuple[Path, Node]]:
    """Nodes of a statement in BFS order; nested statements are separate locations."""
    out: list[tuple[Path, Node]] = []
    queue: deque[tuple[Path, Node]] = deque([((), stmt)])
    while queue:
        path, node = queue.popleft()
        out.append((path, node))
        for step, child in iter_children(node):
            if isinstance(child, Stmt) and not descend_into_nested:
                continue
            queue.append((path + (step,), child))
    return out


def match_patterns(
    site: StatementSite,
    patterns: Optional[Sequence[Pattern]] = None,
    descend_into_nested: bool = False,
) -> list[PatternApplication]:
    """
    Every (node, pattern, donor) match of one statement.

    Ordered by BFS node order, then pattern priority, then donor order.
    """
    if patterns is None:
        patterns = default_catalog().patterns()
    applications = []
    for bfs_index, (path, node) in enumerate(candidate_nodes(site.statement, descend_into_nested)):
        where = Where(site.unit, site.path, path)
        for pattern in patterns:
            if not pattern.applies(node, where, site):
                continue
            for donor_index, donor in enumerate(pattern.donors(node, where, site)):
                applications.append(
                    PatternApplication(
                        statement=site.ref,
                        node=path,
                        pattern_id=pattern.pattern_id,
                        donor=donor,
                        priority=pattern.priority,
                        bfs_index=bfs_index,
                        donor_index=donor_index,
                        target=node,
                    )
                )
    applications.sort(key=lambda a: (a.bfs_index, a.priority, a.donor_index))
    logger.debug(f"{site.ref.file_path}#{site.ref.index}: {len(applications)} pattern applications")
    return applications


def _locate(unit: SourceUnit, application: PatternApplication) -> Where:
    try:
        stmt_path = statement_paths(unit)[application.statement.index]
        node = get_at(unit, stmt_path + application.node)
    except (IndexError, LookupError, AttributeError) as e:
        raise StaleApplication(f"{application.statement.file_path}#{application.statement.index}: {e}") from e
    if node != application.target:
        raise StaleApplication(
            f"{application.statement.file_path}#{application.statement.index}: node changed since matching"
        )
    return Where(unit, stmt_path, application.node)


def compute_edit(unit: SourceUnit, application: PatternApplication, catalog: Optional[Catalog] = None) -> Edit:
    where = _locate(unit, application)
    pattern = (catalog or default_catalog()).get(application.pattern_id)
    return pattern.rewrite(where.node, where, application.donor)


def apply_pattern(
    unit: SourceUnit, application: PatternApplication, catalog: Optional[Catalog] = None
) -> SourceUnit:
    """
    Apply one pattern application to a file AST, returning the new AST.

    Raises:
        StaleApplication: the unit no longer holds the matched node
        NoOpMutant: the edit reproduces the original AST
    """
    return _apply(unit, application, catalog)[1]


def render_edit(source: str, unit: SourceUnit, edit: Edit) -> str:
    """Source text with the edit spliced in at its innermost enclosing statement."""
    stmt_path = edit.path
    while stmt_path and not isinstance(get_at(unit, stmt_path), Stmt):
        stmt_path = stmt_path[:-1]
    original = get_at(unit, stmt_path)
    replacement = replace_at(original, edit.path[len(stmt_path) :], edit.node)
    originals = {id(node) for _, node in walk_preorder(unit)}
    return splice(source, original, replacement, originals)


def mutate_source(
    source: str, unit: SourceUnit, application: PatternApplication, catalog: Optional[Catalog] = None
) -> tuple[SourceUnit, str]:
    """Apply ``application`` and return the mutated AST together with its source text."""
    edit, mutated = _apply(unit, application, catalog)
    return mutated, render_edit(source, unit, edit)


def _apply(unit, application, catalog):
    edit = compute_edit(unit, application, catalog)
    mutated = replace_at(unit, edit.path, edit.node)
    if mutated == unit:
        where = f"{application.statement.file_path}#{application.statement.index}"
        raise NoOpMutant(f"{application.pattern_id} at {where} leaves the file unchanged")
    return edit, mutated
