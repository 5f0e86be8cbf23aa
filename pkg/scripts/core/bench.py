# --- bench.py ---
# Protocolo de medición: una ejecución en frío (no cuenta) y N en caliente
# por (backend, consulta, SF), estrictamente secuenciales.
#
#   execute()        una TranslatedQuery → lista de RunRecord
#   install_setup()  artefactos previos (vistas CouchDB) antes de medir
#   load_dataset()   carga + verificación del conteo (la carga no se mide)
#   run_suite()      varias consultas con prefill por consulta, por familia o sin él
#
# Un timeout o error en una ejecución queda registrado en su RunRecord y la
# suite continúa.

import logging
import time
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import pandas as pd
from tqdm import tqdm

from .adapters import Adapter
from .config import BackendConfig
from .decorators import log_stage, validate_parameters
from .exceptions import (
    AdapterFailure, CountMismatch, DataFileNotFoundError, IoFailure, QueryTimeout,
)
from .ingest import IngestStats, iter_publications
from .queries import QuerySpec
from .translate import TranslatedQuery, translate

logger = logging.getLogger(__name__)

DEFAULT_RUNS = 10


class Phase(str, Enum):
    COLD = "cold"
    WARM = "warm"


class Outcome(str, Enum):
    SUCCESS = "success"
    ERROR = "error"
    TIMEOUT = "timeout"


class PrefillMode(str, Enum):
    QUERY = "query"      # un cold run antes de cada consulta
    FAMILY = "family"    # un cold run al entrar a cada familia (selección / agregación)
    NONE = "none"


@dataclass(frozen=True, slots=True)
class Protocol:
    runs: int = DEFAULT_RUNS
    cold_prefill: bool = True
    prefill: PrefillMode = PrefillMode.QUERY

    def __post_init__(self):
        object.__setattr__(self, 'prefill', PrefillMode(self.prefill))


@dataclass(frozen=True, slots=True, kw_only=True)
class RunRecord:
    """
    Una ejecución medida. run_index 0 es el cold run; 1..N los warm.
    started_at / finished_at son lecturas del reloj del runner (s).
    """
    backend: str
    query: str
    sf: str
    run_index: int
    phase: Phase
    elapsed_ms: float
    outcome: Outcome
    result_count: Optional[int] = None
    detail: str = ""
    prefill: str = PrefillMode.QUERY.value
    started_at: float = 0.0
    finished_at: float = 0.0


# Columnas de runs.csv; las cuatro últimas son extensiones.
RUNS_COLUMNS = [
    'backend', 'query', 'sf', 'run_index', 'phase', 'elapsed_ms', 'outcome',
    'result_count', 'detail', 'prefill', 'started_at', 'finished_at',
]


# =============================================================================
# Operaciones del protocolo
# =============================================================================

def install_setup(cfg: BackendConfig, adapter: Adapter, tq: TranslatedQuery) -> int:
    """
    Aplica los setup_texts en orden. Idempotente: el adaptador trata un
    artefacto ya existente como éxito.

    Devuelve la cantidad de artefactos aplicados; lanza AdapterFailure.
    """
    for text in tq.setup_texts:
        adapter.install(text)
    if tq.setup_texts:
        logger.info("[bench] %s: %d artefacto(s) instalados para %s",
                    cfg.name, len(tq.setup_texts), tq.query)
    return len(tq.setup_texts)


def _timed_run(cfg, adapter, tq, clock, **fields) -> RunRecord:
    started = clock()
    try:
        response = adapter.run(tq.main_text, cfg.timeout)
    except QueryTimeout as exc:
        finished = clock()
        outcome, count, detail = Outcome.TIMEOUT, None, str(exc)
    except AdapterFailure as exc:
        finished = clock()
        outcome, count, detail = Outcome.ERROR, None, exc.detail
    else:
        finished = clock()
        outcome, count, detail = Outcome.SUCCESS, response.result_count, ""
    return RunRecord(
        backend=cfg.name,
        query=tq.query,
        elapsed_ms=(finished - started) * 1000.0,
        outcome=outcome,
        result_count=count,
        detail=detail,
        started_at=started,
        finished_at=finished,
        **fields,
    )


@validate_parameters(
    ('protocol', lambda p: isinstance(p.runs, int) and p.runs >= 0,
     "runs debe ser un entero no negativo"),
)
def execute(
    cfg: BackendConfig,
    adapter: Adapter,
    tq: TranslatedQuery,
    protocol: Protocol = Protocol(),
    sf="",
    clock: Callable[[], float] = time.perf_counter,
    check_reachable: bool = True,
) -> list[RunRecord]:
    """
    Un cold run (si protocol.cold_prefill) y luego protocol.runs warm runs.

    El intervalo medido rodea la petición completa del adaptador. Los
    setup_texts se instalan antes del primer run.

    Lanza
    -----
    BackendUnreachable si el ping falla; AdapterFailure si falla la instalación.
    """
    if check_reachable:
        adapter.ping()
    install_setup(cfg, adapter, tq)

    common = dict(sf=str(sf), prefill=protocol.prefill.value)
    records = []
    if protocol.cold_prefill:
        records.append(_timed_run(cfg, adapter, tq, clock, run_index=0, phase=Phase.COLD, **common))
    for index in range(1, protocol.runs + 1):
        records.append(_timed_run(cfg, adapter, tq, clock, run_index=index, phase=Phase.WARM, **common))

    failed = sum(1 for r in records if r.outcome != Outcome.SUCCESS)
    if failed:
        logger.warning("[bench] %s %s: %d de %d ejecuciones fallaron",
                       cfg.name, tq.query, failed, len(records))
    return records


def expected_documents(files: Sequence[Path]) -> int:
    """Registros contenidos en archivos emitidos (.xml o una línea JSON por documento)."""
    total = 0
    for file in files:
        file = Path(file)
        if not file.exists():
            raise DataFileNotFoundError(file, "Ejecuta primero run_datagen.py.")
        if file.suffix == '.xml':
            stats = IngestStats()
            with file.open('rb') as fh:
                for _ in iter_publications(fh, stats):
                    pass
            total += stats.total
        else:
            with file.open('r', encoding='utf-8') as fh:
                total += sum(1 for line in fh if line.strip())
    return total


@dataclass(frozen=True, slots=True)
class LoadOutcome:
    documents: int
    load_seconds: float   # registrado, excluido de las métricas


@log_stage('name', 'collection')
def load_dataset(cfg: BackendConfig, adapter: Adapter, files: Sequence[Path],
                 expected: Optional[int] = None) -> LoadOutcome:
    """
    Carga los archivos y verifica con una consulta de conteo.

    Lanza
    -----
    AdapterFailure; CountMismatch(expected, actual) si el conteo difiere.
    """
    files = [Path(f) for f in files]
    if expected is None:
        expected = expected_documents(files)
    adapter.ping()
    start = time.perf_counter()
    adapter.load(files)
    elapsed = time.perf_counter() - start
    actual = adapter.count()
    if actual != expected:
        raise CountMismatch(cfg.name, expected, actual)
    logger.info("[bench] %s: %d documentos cargados en %.2f s", cfg.name, actual, elapsed)
    return LoadOutcome(actual, elapsed)


def _failed_runs(cfg, q: QuerySpec, sf, protocol, cold: bool, detail: str,
                 outcome: Outcome = Outcome.ERROR) -> list[RunRecord]:
    phases = ([(0, Phase.COLD)] if cold else []) + [(i, Phase.WARM) for i in range(1, protocol.runs + 1)]
    return [
        RunRecord(backend=cfg.name, query=q.text, sf=str(sf), run_index=i, phase=phase,
                  elapsed_ms=0.0, outcome=outcome, detail=detail,
                  prefill=protocol.prefill.value)
        for i, phase in phases
    ]


@log_stage('name', 'dialect')
def run_suite(
    cfg: BackendConfig,
    adapter: Adapter,
    queries: Iterable[QuerySpec],
    sf,
    protocol: Protocol = Protocol(),
    clock: Callable[[], float] = time.perf_counter,
    progress: bool = False,
) -> list[RunRecord]:
    """
    Ejecuta las consultas en secuencia. El prefill se decide por consulta:
      query  → cold run antes de cada una (el protocolo base);
      family → cold run sólo en la primera consulta de cada familia;
      none   → nunca.
    Un fallo de instalación se registra como error en todas las ejecuciones
    de esa consulta y la suite continúa.
    """
    adapter.ping()
    records = []
    seen_families = set()
    for q in tqdm(list(queries), desc=f"bench {cfg.name}", disable=not progress):
        if protocol.prefill == PrefillMode.QUERY:
            cold = protocol.cold_prefill
        elif protocol.prefill == PrefillMode.FAMILY:
            cold = protocol.cold_prefill and q.family not in seen_families
        else:
            cold = False
        seen_families.add(q.family)

        tq = translate(q, cfg.dialect, cfg.collection)
        try:
            records += execute(cfg, adapter, tq, replace(protocol, cold_prefill=cold),
                               sf=sf, clock=clock, check_reachable=False)
        except QueryTimeout as exc:
            logger.error("[bench] %s %s: timeout en la instalación → %s", cfg.name, q.text, exc)
            records += _failed_runs(cfg, q, sf, protocol, cold, str(exc), Outcome.TIMEOUT)
        except AdapterFailure as exc:
            logger.error("[bench] %s %s: instalación fallida → %s", cfg.name, q.text, exc)
            records += _failed_runs(cfg, q, sf, protocol, cold, exc.detail)
    return records


# =============================================================================
# runs.csv
# =============================================================================

def runs_to_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    rows = []
    for record in records:
        row = asdict(record)
        row['phase'] = record.phase.value
        row['outcome'] = record.outcome.value
        rows.append(row)
    frame = pd.DataFrame(rows, columns=RUNS_COLUMNS)
    frame['result_count'] = frame['result_count'].astype('Int64')
    return frame


def write_runs(records: Sequence[RunRecord], path, append: bool = False) -> Path:
    """Escribe runs.csv (append=True agrega filas sin repetir el encabezado)."""
    path = Path(path)
    frame = runs_to_frame(records)
    exists = path.exists()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, mode='a' if append else 'w',
                     header=not (append and exists), index=False, float_format="%.6f")
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path


def read_runs(path) -> list[RunRecord]:
    """Lee runs.csv; las columnas extendidas son opcionales."""
    path = Path(path)
    if not path.exists():
        raise DataFileNotFoundError(path, "Ejecuta primero run_benchmark.py.")
    frame = pd.read_csv(path, dtype={'sf': str, 'detail': str, 'prefill': str},
                        keep_default_na=False, na_values={'result_count': ['']})
    records = []
    for row in frame.to_dict('records'):
        count = row.get('result_count')
        records.append(RunRecord(
            backend=str(row['backend']),
            query=str(row['query']),
            sf=str(row['sf']),
            run_index=int(row['run_index']),
            phase=Phase(row['phase']),
            elapsed_ms=float(row['elapsed_ms']),
            outcome=Outcome(row['outcome']),
            result_count=None if pd.isna(count) else int(count),
            detail=str(row.get('detail', "")),
            prefill=str(row.get('prefill', PrefillMode.QUERY.value)),
            started_at=float(row.get('started_at', 0.0) or 0.0),
            finished_at=float(row.get('finished_at', 0.0) or 0.0),
        ))
    return records
