"""Information-retrieval fault localization.

Bug reports become tf-idf queries that are scored against file documents by
cosine similarity; statements of the best files are then scored against
per-statement documents and weighted by their file's score.
"""

import csv
import io
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Literal, NamedTuple, Optional, Sequence, Union

import numpy as np
from nltk.stem.porter import PorterStemmer
from pydantic import BaseModel, ConfigDict, Field

from .corpus import BugReport, Corpus, StatementRef
from .errors import EmptyCorpus, EmptyQuery
from .minij.lexer import BUILTINS, KEYWORDS
from .minij.nodes import Call, Name, Node, Stmt, StrLit, Try, VarDecl, iter_children

logger = logging.getLogger(__name__)

_WORD = re.compile(r"[A-Za-z0-9_]+")
_PART = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")
_STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def _load_stopwords() -> frozenset[str]:
    text = resources.files("report_fault_injector").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS = _load_stopwords()


@lru_cache(maxsize=None)
def stem(term: str) -> str:
    return _STEMMER.stem(term)


def _keep(term: str, mode: str) -> bool:
    if len(term) < 2 or term.isdigit():
        return False
    if term in STOPWORDS or term in KEYWORDS:
        return False
    return not (mode == "code" and term in BUILTINS)


def tokenize(text: str, mode: Literal["report", "code"] = "report") -> Counter:
    """
    Normalize text into a multiset of stemmed terms.

    Identifiers are split on underscores, camelCase boundaries and digits; a
    compound identifier is kept alongside its parts.
    """
    terms: Counter = Counter()
    for word in _WORD.findall(text):
        parts = [p.lower() for chunk in word.split("_") for p in _PART.findall(chunk)]
        candidates = [p for p in parts if not p.isdigit()]
        if len(parts) > 1:
            candidates.insert(0, word.replace("_", "").lower())
        for term in candidates:
            if _keep(term, mode):
                terms[stem(term)] += 1
    return terms


class Query(BaseModel):
    model_config = ConfigDict(frozen=True)

    tokens: dict[str, int] = Field(..., description="Term multiset")
    source_report_id: str


def build_query(report: BugReport) -> Query:
    tokens = tokenize(f"{report.title}\n{report.description}", "report")
    if not tokens:
        raise EmptyQuery(f"bug report {report.id} has no usable terms")
    return Query(tokens=dict(sorted(tokens.items())), source_report_id=report.id)


class IndexedDocument(BaseModel):
    model_config = ConfigDict(frozen=True)

    doc_id: Union[str, StatementRef]
    term_weights: dict[str, float]
    norm: float


class RankedFile(NamedTuple):
    path: str
    score: float


class RankedLocation(BaseModel):
    model_config = ConfigDict(frozen=True)

    statement: StatementRef
    score: float = Field(..., ge=0.0, le=1.0)
    file_score: float = Field(..., ge=0.0, le=1.0)
    rank: int = Field(..., ge=1)


def _statement_words(node: Node, out: list[str]) -> None:
    if isinstance(node, Name):
        out.append(node.id)
    elif isinstance(node, Call):
        out.append(node.func)
    elif isinstance(node, VarDecl):
        out.append(node.name)
    elif isinstance(node, Try):
        out.append(node.catch_name)
    elif isinstance(node, StrLit):
        out.append(node.value)
    for _, child in iter_children(node):
        if not isinstance(child, Stmt):
            _statement_words(child, out)


def statement_text(stmt: Stmt, function_name: str) -> str:
    """Words a statement contributes to its document, without nested statements."""
    words = [function_name]
    _statement_words(stmt, words)
    return " ".join(words)


@dataclass
class Index:
    """A tf-idf index over file or statement documents."""

    granularity: Literal["file", "statement"]
    doc_ids: list[Union[str, StatementRef]]
    vocabulary: dict[str, int]
    idf: np.ndarray
    weights: np.ndarray
    norms: np.ndarray
    corpus: Optional[Corpus] = field(default=None, repr=False)
    statements_by_file: dict[str, list[StatementRef]] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.doc_ids)

    def document(self, i: int) -> IndexedDocument:
        terms = list(self.vocabulary)
        row = self.weights[i]
        return IndexedDocument(
            doc_id=self.doc_ids[i],
            term_weights={terms[j]: float(row[j]) for j in np.flatnonzero(row)},
            norm=float(self.norms[i]),
        )

    def query_vector(self, query: Query) -> np.ndarray:
        vector = np.zeros(len(self.vocabulary))
        for term, count in query.tokens.items():
            j = self.vocabulary.get(term)
            if j is not None:
                vector[j] = count * self.idf[j]
        return vector

    def cosine(self, query: Query) -> np.ndarray:
        q = self.query_vector(query)
        q_norm = np.linalg.norm(q)
        if q_norm == 0 or not len(self.doc_ids):
            return np.zeros(len(self.doc_ids))
        return np.clip(self.weights @ q / (self.norms * q_norm), 0.0, 1.0)


def _index_from_documents(
    docs: Sequence[tuple[Union[str, StatementRef], Counter]]
) -> tuple[list, dict[str, int], np.ndarray, np.ndarray, np.ndarray]:
    docs = [(doc_id, terms) for doc_id, terms in docs if terms]
    vocabulary = {t: j for j, t in enumerate(sorted({t for _, terms in docs for t in terms}))}
    counts = np.zeros((len(docs), len(vocabulary)))
    for i, (_, terms) in enumerate(docs):
        for term, count in terms.items():
            counts[i, vocabulary[term]] = count
    n_docs = len(docs)
    df = (counts > 0).sum(axis=0)
    idf = np.log(n_docs / np.maximum(df, 1)) if n_docs else np.zeros(len(vocabulary))
    weights = counts * idf
    norms = np.linalg.norm(weights, axis=1) if n_docs else np.zeros(0)
    keep = norms > 0
    doc_ids = [doc_id for (doc_id, _), k in zip(docs, keep) if k]
    return doc_ids, vocabulary, idf, weights[keep], norms[keep]


def build_index(corpus: Corpus, granularity: Literal["file", "statement"] = "file") -> Index:
    """
    Index the corpus source files (or their statements) with tf * ln(N/df).

    Raises:
        EmptyCorpus: the corpus has no source files or statements
    """
    if granularity == "file":
        docs = [(f.path, tokenize(f.raw_text, "code")) for f in corpus.sources]
    else:
        docs = []
        for f in corpus.sources:
            for ref in f.statements:
                text = statement_text(f.statement(ref.index), f.function_of(ref.index).name)
                docs.append((ref, tokenize(text, "code")))
    if not docs:
        raise EmptyCorpus(f"corpus {corpus.name} has nothing to index at {granularity} level")
    doc_ids, vocabulary, idf, weights, norms = _index_from_documents(docs)
    logger.info(f"Built {granularity} index for {corpus.name}: {len(doc_ids)} documents, {len(vocabulary)} terms")
    return Index(
        granularity=granularity,
        doc_ids=doc_ids,
        vocabulary=vocabulary,
        idf=idf,
        weights=weights,
        norms=norms,
        corpus=corpus,
        statements_by_file={f.path: list(f.statements) for f in corpus.sources},
    )


def rank_files(index: Index, query: Query, k: int) -> list[RankedFile]:
    """Top-k source files by cosine similarity; files without terms score 0."""
    if not query.tokens:
        raise EmptyQuery(f"query for {query.source_report_id} is empty")
    scores = dict(zip(index.doc_ids, index.cosine(query).tolist()))
    paths = [f.path for f in index.corpus.sources] if index.corpus is not None else list(scores)
    ranked = sorted(((p, scores.get(p, 0.0)) for p in paths), key=lambda item: (-item[1], item[0]))
    return [RankedFile(p, float(s)) for p, s in ranked[:k]]


def rank_statements(
    index: Index, query: Query, files: Sequence[tuple[str, float]], n: int
) -> list[RankedLocation]:
    """Statements of ``files`` scored as file score times statement cosine."""
    cosine = dict(zip((ref.key() for ref in index.doc_ids), index.cosine(query).tolist()))
    scored = []
    for path, file_score in files:
        for ref in index.statements_by_file.get(path, []):
            score = min(1.0, float(file_score) * cosine.get(ref.key(), 0.0))
            scored.append((score, float(file_score), ref))
    scored.sort(key=lambda item: (-item[0], item[2].file_path, item[2].index))
    return [
        RankedLocation(statement=ref, score=score, file_score=file_score, rank=rank)
        for rank, (score, file_score, ref) in enumerate(scored[:n], start=1)
    ]


def localize(
    corpus: Corpus,
    report: BugReport,
    top_files: int = 20,
    top_statements: int = 50,
    file_index: Optional[Index] = None,
    statement_index: Optional[Index] = None,
) -> list[RankedLocation]:
    query = build_query(report)
    file_index = file_index or build_index(corpus, "file")
    statement_index = statement_index or build_index(corpus, "statement")
    files = rank_files(file_index, query, top_files)
    return rank_statements(statement_index, query, files, top_statements)


def locations_csv(locations: Sequence[RankedLocation]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rank", "path", "statement_index", "score", "file_score"])
    for loc in locations:
        writer.writerow(
            [loc.rank, loc.statement.file_path, loc.statement.index, f"{loc.score:.6f}", f"{loc.file_score:.6f}"]
        )
    return buffer.getvalue()
