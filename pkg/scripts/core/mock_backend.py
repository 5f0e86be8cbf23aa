# --- mock_backend.py ---
# Backend HTTP de prueba que habla el contrato de HttpEndpointAdapter.
#
# Carga documentos (JSON por línea, XML o _bulk_docs estilo CouchDB), instala
# vistas de diseño (409 si ya existen) y responde consultas en cualquiera de
# los cinco dialectos. Cada texto se interpreta: se extraen de él la fuente,
# los términos del filtro, la conectiva, el modo de mayúsculas y la forma de
# la salida (títulos, por autor, por autor y año). La forma resultante se
# evalúa con el oráculo. Un texto cuya forma no es del catálogo responde 400.
#
# Rutas:
#   GET  /_ping                              → {"ok": true}
#   POST /_load                              → carga ndjson o xml
#   GET  /_count                             → {"count": n}
#   POST /_query                             → {"rows": [...]}
#   PUT  /<db>                               → 201 | 412
#   GET  /<db>                               → {"doc_count": n}
#   POST /<db>/_bulk_docs                    → carga {"docs": [...]}
#   PUT  /<db>/_design/<name>                → 201 | 409 | 400
#   GET  /<db>/_design/<name>/_view/q        → {"rows": [{"key", "value"}]}
#   POST /<db>/_find                         → {"docs": [{"title"}]}

import io
import json
import logging
import re
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlsplit

from .config import AdapterKind, BackendConfig
from .datagen import parse_json_document
from .exceptions import DodBenchError
from .ingest import ingest_stream
from .model import TermParam
from .oracle import Dataset, evaluate
from .queries import Connective, QueryId, QuerySpec, build_query
from .translate import DEFAULT_COLLECTION, VIEW_NAME, Dialect

logger = logging.getLogger(__name__)


# =============================================================================
# Intérprete de textos traducidos
# =============================================================================

SELECTION = "selection"
BY_AUTHOR = "author"
BY_AUTHOR_YEAR = "author_year"

# (salida, conectiva, nº de términos) → consulta
SHAPES = {
    (SELECTION, None, 1): QueryId.Q1,
    (SELECTION, Connective.AND, 2): QueryId.Q2,
    (SELECTION, Connective.OR, 2): QueryId.Q3,
    (SELECTION, Connective.AND, 3): QueryId.Q4,
    (SELECTION, Connective.OR, 3): QueryId.Q5,
    (BY_AUTHOR, None, 0): QueryId.Q6,
    (BY_AUTHOR_YEAR, None, 0): QueryId.Q7,
    (BY_AUTHOR_YEAR, Connective.AND, 3): QueryId.Q8,
    (BY_AUTHOR_YEAR, Connective.OR, 3): QueryId.Q9,
}

_XQ_SOURCE = re.compile(r'collection\("((?:[^"]|"")*)"\)')
_XQ_CONTAINS = re.compile(r'contains\((lower-case\(\$r/title\)|\$r/title), "((?:[^"]|"")*)"\)')
_XQ_JOINERS = {"and": Connective.AND, "or": Connective.OR}

_N1QL_SOURCE = re.compile(r"FROM `([^`]+)` AS d")
_N1QL_CONTAINS = re.compile(r'CONTAINS\((LOWER\(d\.title\)|d\.title), ("(?:[^"\\]|\\.)*")\)')
_N1QL_JOINERS = {"AND": Connective.AND, "OR": Connective.OR}

_JS_INDEX_OF = re.compile(r't\.indexOf\(("(?:[^"\\]|\\.)*")\) !== -1')
_JS_JOINERS = {"&&": Connective.AND, "||": Connective.OR}

_MONGO_CALL = re.compile(r"db\.([^.(]+)\.(find|aggregate)\(")
_REGEX_ESCAPE = re.compile(r"\\(.)")
_CASE_INSENSITIVE = "(?i)"


def _xquery_literal(text: str) -> str:
    return text.replace('""', '"').replace('&amp;', '&')


def _connective(text: str, matches, joiners) -> Optional[Connective]:
    """Conectiva entre coincidencias consecutivas; una sola por filtro."""
    found = set()
    for left, right in zip(matches, matches[1:]):
        joiner = text[left.end():right.start()].strip()
        if joiner not in joiners:
            raise ValueError(f"conectiva no reconocida: {joiner!r}")
        found.add(joiners[joiner])
    if len(found) > 1:
        raise ValueError("conectivas mezcladas en el filtro")
    return found.pop() if found else None


def _single_mode(flags) -> bool:
    """True si todas las hojas distinguen mayúsculas; un filtro mixto no es del catálogo."""
    flags = set(flags)
    if len(flags) > 1:
        raise ValueError("modo de mayúsculas mixto en el filtro")
    return flags == {True}


def shape_to_spec(output: str, connective, terms, case_sensitive: bool) -> QuerySpec:
    """
    QuerySpec equivalente a una forma extraída de un texto.

    Lanza ValueError si la forma no corresponde a Q1..Q9.
    """
    qid = SHAPES.get((output, connective, len(terms)))
    if qid is None:
        raise ValueError(f"forma fuera del catálogo: {output}, {connective}, {len(terms)} término(s)")
    params = [TermParam(i, t) for i, t in enumerate(terms, start=1)]
    return build_query(qid, params, case_sensitive)


def selector_terms(node) -> tuple[Optional[Connective], list[tuple[str, bool]]]:
    """(conectiva, [(término, distingue mayúsculas)]) de un selector Mongo o Mango."""
    if not node:
        return None, []
    keys = set(node)
    if keys in ({"$and"}, {"$or"}):
        key = keys.pop()
        leaves = []
        for child in node[key]:
            inner, found = selector_terms(child)
            if inner is not None:
                raise ValueError("selectores anidados")
            leaves += found
        return (Connective.AND if key == "$and" else Connective.OR), leaves
    if keys == {"title"}:
        condition = node["title"]
        pattern = condition["$regex"]
        insensitive = condition.get("$options") == "i" or pattern.startswith(_CASE_INSENSITIVE)
        if pattern.startswith(_CASE_INSENSITIVE):
            pattern = pattern[len(_CASE_INSENSITIVE):]
        return None, [(_REGEX_ESCAPE.sub(r"\1", pattern), not insensitive)]
    raise ValueError(f"selector no reconocido: {sorted(keys)}")


def _selector_spec(node, output: str) -> QuerySpec:
    connective, leaves = selector_terms(node)
    return shape_to_spec(output, connective, [t for t, _ in leaves],
                         _single_mode(cs for _, cs in leaves))


def interpret_map(source: str) -> QuerySpec:
    """Forma de una función map de CouchDB (filtro en el map, emit por autor)."""
    if "emit(" not in source:
        raise ValueError("la función map no emite filas")
    matches = list(_JS_INDEX_OF.finditer(source))
    terms = [json.loads(m.group(1)) for m in matches]
    output = BY_AUTHOR_YEAR if "doc.year]" in source else BY_AUTHOR
    return shape_to_spec(output, _connective(source, matches, _JS_JOINERS), terms,
                         bool(matches) and ".toLowerCase()" not in source)


class MockBackend:
    """Estado del backend simulado; seguro entre hilos del servidor."""

    def __init__(self, collection: str = DEFAULT_COLLECTION):
        self.collection = collection
        self._lock = threading.Lock()
        self._records = []
        self._dataset = None
        self._database_created = False
        self._designs = {}

    # --- datos ---

    def add_records(self, records) -> int:
        records = list(records)
        with self._lock:
            self._records.extend(records)
            self._dataset = None
        return len(records)

    def dataset(self) -> Dataset:
        with self._lock:
            if self._dataset is None:
                self._dataset = Dataset.from_records(self._records)
            return self._dataset

    def count(self) -> int:
        with self._lock:
            return len(self._records)

    def load_ndjson(self, payload: bytes) -> int:
        lines = payload.decode('utf-8').splitlines()
        return self.add_records(parse_json_document(json.loads(l)) for l in lines if l.strip())

    def load_xml(self, payload: bytes) -> int:
        collected = []
        ingest_stream(io.BytesIO(payload), collected.append)
        return self.add_records(collected)

    def create_database(self) -> bool:
        with self._lock:
            created = not self._database_created
            self._database_created = True
            return created

    # --- consultas ---

    def _check_source(self, name: Optional[str]) -> None:
        if name != self.collection:
            raise ValueError(f"colección desconocida: {name!r}")

    def interpret(self, text: str) -> QuerySpec:
        """
        Forma del catálogo de un texto XQuery, N1QL o Mongo.

        Lanza
        -----
        ValueError si el texto no se reconoce o su forma no es del catálogo.
        """
        text = text.strip()
        if text.startswith("xquery version"):
            return self._interpret_xquery(text)
        if text.startswith("db."):
            return self._interpret_mongo(text)
        if text.startswith("SELECT"):
            return self._interpret_n1ql(text)
        raise ValueError("dialecto no reconocido")

    def _interpret_xquery(self, text: str) -> QuerySpec:
        source = _XQ_SOURCE.search(text)
        self._check_source(_xquery_literal(source.group(1)) if source else None)
        matches = list(_XQ_CONTAINS.finditer(text))
        if "return <row><author>" in text:
            output = BY_AUTHOR_YEAR if "</author><year>" in text else BY_AUTHOR
        elif "return <row>{string($r/title)}</row>" in text:
            output = SELECTION
        else:
            raise ValueError("cláusula return no reconocida")
        return shape_to_spec(
            output,
            _connective(text, matches, _XQ_JOINERS),
            [_xquery_literal(m.group(2)) for m in matches],
            _single_mode(not m.group(1).startswith("lower-case") for m in matches),
        )

    def _interpret_n1ql(self, text: str) -> QuerySpec:
        source = _N1QL_SOURCE.search(text)
        self._check_source(source.group(1) if source else None)
        matches = list(_N1QL_CONTAINS.finditer(text))
        if text.startswith("SELECT a AS author"):
            output = BY_AUTHOR_YEAR if "d.year AS year" in text else BY_AUTHOR
        elif text.startswith("SELECT d.title"):
            output = SELECTION
        else:
            raise ValueError("proyección no reconocida")
        return shape_to_spec(
            output,
            _connective(text, matches, _N1QL_JOINERS),
            [json.loads(m.group(2)) for m in matches],
            _single_mode(m.group(1) == "d.title" for m in matches),
        )

    def _interpret_mongo(self, text: str) -> QuerySpec:
        call = _MONGO_CALL.match(text)
        if call is None:
            raise ValueError("llamada Mongo no reconocida")
        self._check_source(call.group(1))
        document, _ = json.JSONDecoder().raw_decode(text, call.end())
        if call.group(2) == "find":
            return _selector_spec(document, SELECTION)
        match, group = {}, None
        for stage in document:
            if "$match" in stage:
                match = stage["$match"]
            elif "$group" in stage:
                group = stage["$group"]["_id"]
        if not isinstance(group, dict) or "author" not in group:
            raise ValueError("pipeline sin $group por autor")
        return _selector_spec(match, BY_AUTHOR_YEAR if "year" in group else BY_AUTHOR)

    def interpret_find(self, body: str) -> QuerySpec:
        return _selector_spec(json.loads(body)["selector"], SELECTION)

    def install_design(self, name: str, body: str) -> int:
        """201 instalada, 409 ya existía, 400 vista ilegible o fuera del catálogo."""
        with self._lock:
            if name in self._designs:
                return 409
        try:
            view = json.loads(body)["views"][VIEW_NAME]
            if view.get("reduce") != "_count":
                raise ValueError("se espera reduce _count")
            q = interpret_map(view["map"])
        except (ValueError, KeyError, TypeError, DodBenchError) as exc:
            logger.debug("[mock] vista %s rechazada: %s", name, exc)
            return 400
        with self._lock:
            if name in self._designs:
                return 409
            self._designs[name] = q
        return 201

    def view(self, name: str) -> Optional[QuerySpec]:
        with self._lock:
            return self._designs.get(name)

    def rows(self, q: QuerySpec) -> list[dict]:
        rs = evaluate(self.dataset(), q)
        if not rs.is_aggregation:
            return [{"title": t} for t in rs.titles]
        return [
            dict(author=key[0], **({"year": key[1]} if len(key) > 1 else {}), count=n)
            for key, n in rs.groups
        ]


# =============================================================================
# Servidor HTTP
# =============================================================================


class _Handler(BaseHTTPRequestHandler):
    server_version = "dodbench-mock/1.0"

    @property
    def backend(self) -> MockBackend:
        return self.server.backend

    def log_message(self, fmt, *args):
        logger.debug("[mock] " + fmt, *args)

    def _body(self) -> bytes:
        length = int(self.headers.get('Content-Length') or 0)
        return self.rfile.read(length) if length else b""

    def _reply(self, status: int, payload) -> None:
        data = json.dumps(payload, ensure_ascii=False).encode('utf-8')
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _parts(self) -> list[str]:
        return [p for p in urlsplit(self.path).path.split('/') if p]

    def do_GET(self):
        parts = self._parts()
        db = self.backend.collection
        if parts == ['_ping']:
            self._reply(200, {"ok": True})
        elif parts == ['_count']:
            self._reply(200, {"count": self.backend.count()})
        elif parts == [db]:
            self._reply(200, {"db_name": db, "doc_count": self.backend.count()})
        elif len(parts) == 5 and parts[0] == db and parts[1] == '_design' and parts[3] == '_view':
            q = self.backend.view(parts[2])
            if q is None:
                self._reply(404, {"error": "not_found", "reason": "missing"})
                return
            rows = [{"key": [r["author"]] + ([r["year"]] if "year" in r else []),
                     "value": r["count"]} for r in self.backend.rows(q)]
            if parse_qs(urlsplit(self.path).query).get("group") != ["true"]:
                # sin group=true el reduce _count colapsa todo en una fila
                rows = [{"key": None, "value": sum(r["value"] for r in rows)}] if rows else []
            self._reply(200, {"rows": rows})
        else:
            self._reply(404, {"error": "not_found"})

    def do_PUT(self):
        parts = self._parts()
        db = self.backend.collection
        body = self._body()
        if parts == [db]:
            created = self.backend.create_database()
            self._reply(201 if created else 412, {"ok": created} if created
                        else {"error": "file_exists"})
        elif len(parts) == 3 and parts[0] == db and parts[1] == '_design':
            status = self.backend.install_design(parts[2], body.decode('utf-8'))
            payload = {201: {"ok": True, "id": f"_design/{parts[2]}"},
                       409: {"error": "conflict", "reason": "Document update conflict."},
                       400: {"error": "bad_request", "reason": "view outside the catalogue"}}[status]
            self._reply(status, payload)
        else:
            self._reply(404, {"error": "not_found"})

    def do_POST(self):
        parts = self._parts()
        db = self.backend.collection
        body = self._body()
        try:
            if parts == ['_load']:
                if 'xml' in (self.headers.get('Content-Type') or ''):
                    loaded = self.backend.load_xml(body)
                else:
                    loaded = self.backend.load_ndjson(body)
                self._reply(200, {"loaded": loaded})
            elif parts == ['_query']:
                q = self.backend.interpret(body.decode('utf-8'))
                self._reply(200, {"rows": self.backend.rows(q)})
            elif parts == [db, '_bulk_docs']:
                docs = json.loads(body)["docs"]
                self.backend.add_records(parse_json_document(d) for d in docs)
                self._reply(201, [{"ok": True, "id": d["_id"]} for d in docs])
            elif parts == [db, '_find']:
                q = self.backend.interpret_find(body.decode('utf-8'))
                self._reply(200, {"docs": self.backend.rows(q)})
            else:
                self._reply(404, {"error": "not_found"})
        except (ValueError, KeyError, TypeError, DodBenchError) as exc:
            self._reply(400, {"error": "bad_request", "reason": str(exc)})


def serve(host: str = "127.0.0.1", port: int = 0,
          collection: str = DEFAULT_COLLECTION) -> ThreadingHTTPServer:
    """Crea el servidor (port=0 elige un puerto libre). No bloquea."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.daemon_threads = True
    server.backend = MockBackend(collection)
    return server


@contextmanager
def running_mock(collection: str = DEFAULT_COLLECTION):
    """Servidor en un hilo de fondo; entrega (url, MockBackend)."""
    server = serve(collection=collection)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    try:
        yield f"http://{host}:{port}", server.backend
    finally:
        server.shutdown()
        server.server_close()
        thread.join()


def mock_backend_config(url: str, dialect, name: Optional[str] = None,
                        collection: str = DEFAULT_COLLECTION) -> BackendConfig:
    """BackendConfig http apuntando al mock para un dialecto."""
    dialect = Dialect(dialect)
    connection = {
        "url": url,
        "ping_path": "/_ping",
        "query_path": "/_query",
        "result_format": "json",
        "result_keys": ["rows", "docs"],
    }
    if dialect == Dialect.COUCH_MANGO_VIEW:
        connection.update(load_format="couch-bulk", count_request=f"GET /{collection}",
                          count_key="doc_count")
    else:
        connection.update(load_path="/_load",
                          load_format="xml" if dialect.data_format == "xml" else "ndjson",
                          count_request="GET /_count", count_key="count")
    return BackendConfig(
        name=name or f"mock-{dialect.value.lower()}",
        adapter_kind=AdapterKind.HTTP_ENDPOINT,
        dialect=dialect,
        connection=connection,
        timeout=60.0,
        collection=collection,
    )
