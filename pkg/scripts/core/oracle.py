# --- oracle.py ---
# Evaluador exacto en memoria de las QuerySpec: la referencia contra la que
# se validan las traducciones de cada backend.
#
# Selección (Q1–Q5): un recorrido sobre los registros con el predicate del
# filtro; semántica de conjunto sobre registros (cada registro una vez, en
# orden de archivo; dos registros con el mismo título dan dos filas).
#
# Agregación (Q6–Q9): cada registro se "desenrolla" en pares (autor, registro),
# uno por aparición del autor (el join Records ⋈ Authors que reconstruyen
# $unwind / UNNEST); el filtro se aplica al título del registro y se cuenta
# por grupo. Un autor listado dos veces en un registro cuenta dos veces.
#
# Índice invertido opcional sobre tokens del título: sólo preselecciona
# candidatos; cada candidato se verifica con el predicate, así que nunca
# cambia el resultado.

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from scripts.utils.canonical_io import read_canonical

from .decorators import timer
from .exceptions import DuplicateRecordId, EmptyPopulation, InvalidParameterError
from .model import CanonicalRecord
from .queries import TOKEN_PATTERN, BoolExpr, Connective, QuerySpec, tokenize

logger = logging.getLogger(__name__)


# =============================================================================
# Dataset
# =============================================================================

@dataclass(frozen=True, slots=True)
class Dataset:
    """
    Registros indexados, inmutables tras la carga.

    pair_count = Σ len(authors) — la población N de las agregaciones.
    len(records) es la población N de las selecciones.
    """
    records: tuple[CanonicalRecord, ...]
    pair_count: int
    vocabulary: frozenset
    token_index: Optional[Mapping[str, tuple[int, ...]]] = None

    @property
    def record_count(self) -> int:
        return len(self.records)

    @classmethod
    def from_records(cls, records: Iterable[CanonicalRecord], build_index: bool = False) -> 'Dataset':
        records = tuple(records)
        vocabulary = set()
        postings = defaultdict(list) if build_index else None
        pair_count = 0
        for position, record in enumerate(records):
            pair_count += len(record.authors)
            tokens = tokenize(record.title)
            vocabulary.update(tokens)
            if postings is not None:
                for token in set(tokens):
                    postings[token].append(position)
        index = None
        if postings is not None:
            index = MappingProxyType({tok: tuple(pos) for tok, pos in postings.items()})
        return cls(records, pair_count, frozenset(vocabulary), index)


@timer
def load(path, build_index: bool = False) -> Dataset:
    """
    Carga un archivo canónico.

    Lanza
    -----
    CorruptRecord      línea ilegible (con número de línea).
    DuplicateRecordId  record_id repetido.
    """
    seen = set()
    records = []
    for line_number, record in read_canonical(Path(path)):
        if record.record_id in seen:
            raise DuplicateRecordId(record.record_id, line_number)
        seen.add(record.record_id)
        records.append(record)
    ds = Dataset.from_records(records, build_index=build_index)
    logger.info("[oracle] %d registros, %d pares autor-registro, vocabulario de %d tokens",
                ds.record_count, ds.pair_count, len(ds.vocabulary))
    return ds


# =============================================================================
# Resultados
# =============================================================================

@dataclass(frozen=True, slots=True)
class ResultSet:
    """
    Selección: titles / record_ids en orden de registro.
    Agregación: groups = ((clave), count) ordenados por clave; sin claves repetidas.
    """
    query: str
    is_aggregation: bool
    titles: tuple[str, ...] = ()
    record_ids: tuple[str, ...] = ()
    groups: tuple[tuple[tuple, int], ...] = ()

    @property
    def row_count(self) -> int:
        return len(self.groups) if self.is_aggregation else len(self.titles)

    def as_counts(self) -> dict:
        return dict(self.groups)

    def rows(self) -> list[dict]:
        """Filas con los nombres de atributo de la proyección."""
        if not self.is_aggregation:
            return [{"record_id": rid, "title": t} for rid, t in zip(self.record_ids, self.titles)]
        out = []
        for key, count in self.groups:
            row = {"author_name": key[0]}
            if len(key) > 1:
                row["year"] = key[1]
            row["count"] = count
            out.append(row)
        return out


@dataclass(frozen=True, slots=True)
class SelectivityReport:
    """S = 1 − n/N con 0 ≤ S ≤ 1."""
    query: str
    n: int
    population: int
    s: float


# =============================================================================
# Evaluación
# =============================================================================

def _leaf_candidates(ds: Dataset, term: str) -> Optional[set[int]]:
    """
    Posiciones cuyo título contiene term (en minúsculas) dentro de algún token.
    None si term tiene separadores: no se puede preseleccionar.
    """
    needle = term.lower()
    if not TOKEN_PATTERN.fullmatch(needle):
        return None
    found = set()
    for token, positions in ds.token_index.items():
        if needle in token:
            found.update(positions)
    return found


def _candidates(ds: Dataset, expr) -> Optional[set[int]]:
    if not isinstance(expr, BoolExpr):
        return _leaf_candidates(ds, expr.term.term)
    parts = [_candidates(ds, o) for o in expr.operands]
    if expr.op == Connective.AND:
        known = [p for p in parts if p is not None]
        return set.intersection(*known) if known else None
    if any(p is None for p in parts):
        return None
    return set.union(*parts)


def _matching(ds: Dataset, q: QuerySpec, use_index: bool) -> Iterable[CanonicalRecord]:
    if q.filter is None:
        return ds.records
    positions = None
    # Los tokens están en minúsculas: sólo preseleccionan sin distinguir mayúsculas.
    if use_index and ds.token_index is not None and not q.case_sensitive:
        positions = _candidates(ds, q.filter)
    pool = ds.records if positions is None else (ds.records[p] for p in sorted(positions))
    return (r for r in pool if q.filter.matches(r.title, q.case_sensitive))


def evaluate(ds: Dataset, q: QuerySpec, use_index: bool = True) -> ResultSet:
    """
    Evalúa q sobre ds.

    use_index=False fuerza el recorrido completo aunque ds tenga índice.
    Seguro para llamadas concurrentes sobre el mismo Dataset.
    """
    matched = _matching(ds, q, use_index)
    if not q.is_aggregation:
        rows = [(r.record_id, r.title) for r in matched]
        return ResultSet(
            query=q.text,
            is_aggregation=False,
            titles=tuple(t for _, t in rows),
            record_ids=tuple(rid for rid, _ in rows),
        )

    by_year = q.aggregation.by_year
    counts = Counter()
    for record in matched:
        for author in record.authors:
            counts[(author, record.year) if by_year else (author,)] += 1
    return ResultSet(query=q.text, is_aggregation=True, groups=tuple(sorted(counts.items())))


def selectivity(ds: Dataset, q: QuerySpec, rs: ResultSet) -> SelectivityReport:
    """
    S(Q) = 1 − n(Q)/N.

    N = cantidad de registros (selección) o ds.pair_count (agregación);
    n = filas devueltas (títulos o grupos).

    Lanza
    -----
    EmptyPopulation si N = 0.
    """
    if rs.query != q.text or rs.is_aggregation != q.is_aggregation:
        raise InvalidParameterError('rs', rs.query, f"no proviene de {q.text}")
    population = ds.pair_count if q.is_aggregation else ds.record_count
    if population == 0:
        raise EmptyPopulation(q.text)
    n = rs.row_count
    return SelectivityReport(query=q.text, n=n, population=population, s=1.0 - n / population)
