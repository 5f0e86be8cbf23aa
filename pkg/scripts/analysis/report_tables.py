# --- report_tables.py ---
# De RunRecords a estadísticas por consulta y a los CSV de las figuras.
#
#   summarize()          media y desviación estándar MUESTRAL (ddof=1) de los
#                        warm runs exitosos; los cold runs nunca cuentan.
#   emit_figure_csv()    un CSV por consulta: NO_DOCS (posición 1..4 del SF) y
#                        <BACKEND>_AVG / <BACKEND>_STD en ms con 3 decimales;
#                        más las tablas de selectividad (filas SF, columnas en
#                        el orden de las tablas de filtros y de agregación).

import logging
import re
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from scripts.core.bench import Outcome, Phase, RunRecord
from scripts.core.exceptions import DataFileNotFoundError, InvalidScaleFactor, IoFailure
from scripts.core.model import SCALE_FACTORS, ScaleFactor
from scripts.core.oracle import SelectivityReport
from scripts.core.queries import QueryId, QuerySpec, catalogue_instances, parse_query_text

logger = logging.getLogger(__name__)

# Orden de columnas de los seis sistemas; otros backends van después, en orden alfabético.
BACKEND_ORDER = ("BASEX", "EXISTDB", "SEDNA", "MONGODB", "COUCHDB", "COUCHBASE")
PRECISION = 3
FILTER_TABLE = "filter_selectivity.csv"
AGGREGATION_TABLE = "aggregation_selectivity.csv"
SUMMARY_FILE = "summary.csv"
SELECTIVITY_COLUMNS = ['sf', 'query', 'n', 'N', 's']


@dataclass(frozen=True, slots=True)
class QueryStats:
    """
    Estadística de un grupo (backend, consulta, SF) sobre warm runs exitosos.
    mean_ms / std_ms son None si no hubo ningún éxito.
    """
    backend: str
    query: str
    sf: str
    mean_ms: Optional[float]
    std_ms: Optional[float]
    run_count: int
    error_count: int
    low_confidence: bool = False


def _sf_sort_key(sf: str):
    try:
        return (0, float(sf))
    except ValueError:
        return (1, sf)


def summarize(runs: Iterable[RunRecord]) -> list[QueryStats]:
    """
    Una QueryStats por (backend, consulta, SF) con al menos un warm run.
    Independiente del orden de entrada.

    Con un solo éxito la desviación es 0 y la fila queda low_confidence.
    """
    groups = defaultdict(lambda: ([], 0))
    for run in runs:
        if run.phase != Phase.WARM:
            continue
        key = (run.backend, run.query, run.sf)
        elapsed, errors = groups[key]
        if run.outcome == Outcome.SUCCESS:
            elapsed.append(run.elapsed_ms)
        else:
            errors += 1
        groups[key] = (elapsed, errors)

    stats = []
    for (backend, query, sf) in sorted(groups, key=lambda k: (k[0], k[1], _sf_sort_key(k[2]))):
        elapsed, errors = groups[(backend, query, sf)]
        values = np.sort(np.asarray(elapsed, dtype=float))
        if values.size == 0:
            mean = std = None
        else:
            mean = float(np.mean(values))
            std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        stats.append(QueryStats(backend, query, sf, mean, std, int(values.size), errors,
                                low_confidence=values.size == 1))
    return stats


# =============================================================================
# Nombres de archivo y columnas
# =============================================================================

def figure_stem(q: QuerySpec) -> str:
    """
    Nombre del CSV de figura: q1_kw2, q2_kw1a3 (Q2), q2_kw1o3 (Q3),
    q3_kw1a2a3 (Q4), q3_kw1o2o3 (Q5), count_docs_authors (Q6),
    count_docs_authors_year (Q7), count_all_authors_year_kw1a2a3 (Q8),
    count_all_authors_year_kw1o2o3 (Q9).
    """
    def conj(sep: str) -> str:
        return sep.join(str(i) for i in q.indices)

    return {
        QueryId.Q1: lambda: f"q1_kw{q.indices[0]}",
        QueryId.Q2: lambda: f"q2_kw{conj('a')}",
        QueryId.Q3: lambda: f"q2_kw{conj('o')}",
        QueryId.Q4: lambda: f"q3_kw{conj('a')}",
        QueryId.Q5: lambda: f"q3_kw{conj('o')}",
        QueryId.Q6: lambda: "count_docs_authors",
        QueryId.Q7: lambda: "count_docs_authors_year",
        QueryId.Q8: lambda: f"count_all_authors_year_kw{conj('a')}",
        QueryId.Q9: lambda: f"count_all_authors_year_kw{conj('o')}",
    }[q.id]()


def backend_column(name: str) -> str:
    """'exist-db' → 'EXISTDB'."""
    return re.sub(r"[^A-Za-z0-9]", "", name).upper()


def _ordered_backends(names: Iterable[str]) -> list[str]:
    names = sorted(set(names), key=backend_column)
    known = [n for col in BACKEND_ORDER for n in names if backend_column(n) == col]
    return known + [n for n in names if n not in known]


# =============================================================================
# Emisión
# =============================================================================

def _round(value: Optional[float]) -> float:
    return np.nan if value is None else round(value, PRECISION)


def _write(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=f"%.{PRECISION}f", na_rep="")
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path


def _sf_position(sf) -> Optional[int]:
    try:
        return ScaleFactor.parse(sf).position
    except InvalidScaleFactor:
        return None


def figure_frame(stats: Sequence[QueryStats], query: str) -> pd.DataFrame:
    """
    Tabla de una consulta: 4 filas (posiciones SF), NO_DOCS + pares AVG/STD.
    Las filas cuyo sf no es un SF de benchmark ("", "live") se omiten.
    """
    rows = []
    for s in stats:
        if s.query != query:
            continue
        if _sf_position(s.sf) is None:
            logger.warning("[report] %s @ %s: sf %r fuera de los SF de benchmark, omitido",
                           query, s.backend, s.sf)
            continue
        rows.append(s)
    backends = _ordered_backends(s.backend for s in rows)
    frame = pd.DataFrame({"NO_DOCS": [ScaleFactor(v).position for v in SCALE_FACTORS]})
    for backend in backends:
        avg = {}
        std = {}
        for s in rows:
            if s.backend == backend:
                position = _sf_position(s.sf)
                avg[position], std[position] = _round(s.mean_ms), _round(s.std_ms)
        column = backend_column(backend)
        frame[f"{column}_AVG"] = frame["NO_DOCS"].map(avg).astype(float)
        frame[f"{column}_STD"] = frame["NO_DOCS"].map(std).astype(float)
    return frame


def selectivity_tables(
    selectivity: Iterable[tuple[str, SelectivityReport]],
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """
    (filtros, agregaciones): filas SF, columnas en el orden
    Q1_1 Q1_2 Q1_3 Q2_12 Q2_13 Q2_23 Q3_12 Q3_13 Q3_23 Q4 Q5 | Q6 Q7 Q8 Q9.
    """
    catalogue = catalogue_instances()
    values = {}
    for sf, report in selectivity:
        values[(str(ScaleFactor.parse(sf)), parse_query_text(report.query).label)] = report.s

    sfs = sorted({sf for sf, _ in values}, key=float)
    tables = []
    for aggregation in (False, True):
        labels = [q.label for q in catalogue if q.is_aggregation == aggregation]
        frame = pd.DataFrame({"SF": sfs})
        for label in labels:
            frame[label] = [values.get((sf, label), np.nan) for sf in sfs]
        tables.append(frame)
    return tables[0], tables[1]


def emit_figure_csv(stats: Sequence[QueryStats],
                    selectivity: Iterable[tuple[str, SelectivityReport]],
                    out) -> list[Path]:
    """
    Escribe un CSV por consulta presente en stats, summary.csv y, si hay
    datos de selectividad, las dos tablas de selectividad.

    Lanza IoFailure.
    """
    out = Path(out)
    written = []
    for query in sorted({s.query for s in stats}, key=_catalogue_position):
        stem = figure_stem(parse_query_text(query))
        written.append(_write(figure_frame(stats, query), out / f"{stem}.csv"))

    summary = pd.DataFrame([asdict(s) for s in stats],
                           columns=list(QueryStats.__dataclass_fields__))
    written.append(_write(summary, out / SUMMARY_FILE))

    selectivity = list(selectivity)
    if selectivity:
        filters, aggregations = selectivity_tables(selectivity)
        written.append(_write(filters, out / FILTER_TABLE))
        written.append(_write(aggregations, out / AGGREGATION_TABLE))
    logger.info("[report] %d archivo(s) CSV en %s", len(written), out)
    return written


def _catalogue_position(query: str) -> int:
    texts = [q.text for q in catalogue_instances()]
    return texts.index(query) if query in texts else len(texts)


# =============================================================================
# Lectura de selectividad (salida de run_oracle --emit selectivity)
# =============================================================================

def selectivity_frame(entries: Iterable[tuple[str, SelectivityReport]]) -> pd.DataFrame:
    return pd.DataFrame(
        [(sf, r.query, r.n, r.population, r.s) for sf, r in entries],
        columns=SELECTIVITY_COLUMNS,
    )


def read_selectivity(path) -> list[tuple[str, SelectivityReport]]:
    path = Path(path)
    if not path.exists():
        raise DataFileNotFoundError(path, "Ejecuta run_oracle.py --emit selectivity.")
    frame = pd.read_csv(path, dtype={'sf': str, 'query': str})
    return [
        (row['sf'], SelectivityReport(row['query'], int(row['n']), int(row['N']), float(row['s'])))
        for row in frame.to_dict('records')
    ]
