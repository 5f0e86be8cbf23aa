# --- adapters.py ---
# Adaptadores de backend: la única frontera entre el harness y un DBMS.
#
# Dos tipos, los mismos con los que se manejaron los seis sistemas:
#   CommandRunnerAdapter  plantilla de comando (CLI nativa); el intervalo medido
#                         va de lanzar el proceso a su salida.
#   HttpEndpointAdapter   peticiones HTTP (el equivalente de cURL); el intervalo
#                         va de enviar la petición a terminar de leer el cuerpo.
# Los tiempos son comparables dentro de un tipo de adaptador, no entre tipos.
#
# Jerarquía:
#   Adapter (ABC): ping / run / install / load / count
#   ├── CommandRunnerAdapter
#   └── HttpEndpointAdapter
#   + create_adapter(cfg) como fábrica.
#
# Timeouts: subprocess.run(timeout=...) mata el proceso; requests corta la
# conexión. Ambos se convierten en QueryTimeout.

import json
import logging
import os
import re
import shlex
import shutil
import subprocess
import tempfile
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import islice
from pathlib import Path
from typing import Optional, Sequence

import requests

from .config import AdapterKind, BackendConfig
from .exceptions import AdapterFailure, BackendUnreachable, ConfigError, QueryTimeout

logger = logging.getLogger(__name__)

DEFAULT_RESULT_KEYS = ("rows", "docs", "results", "count")
COUCH_BULK_BATCH = 10000
PING_TIMEOUT = 10.0
_RAW_REQUEST = re.compile(r"^(GET|POST|PUT|DELETE|HEAD) (/\S*)$")


@dataclass(frozen=True, slots=True)
class AdapterResponse:
    body: str
    result_count: Optional[int] = None


# =============================================================================
# Conteo de resultados
# =============================================================================

def _lookup(document, dotted: str):
    """'results.0' → document['results'][0]; None si la ruta no existe."""
    value = document
    for part in dotted.split('.'):
        if isinstance(value, list) and part.isdigit() and int(part) < len(value):
            value = value[int(part)]
        elif isinstance(value, dict) and part in value:
            value = value[part]
        else:
            return None
    return value


def count_results(body: str, result_format: str = 'json',
                  result_keys: Sequence[str] = DEFAULT_RESULT_KEYS,
                  result_pattern: Optional[str] = None) -> Optional[int]:
    """
    Cantidad de filas de una respuesta, según el formato configurado.

      json    : lista de nivel superior → len; si no, la primera clave de
                result_keys presente (lista → len, entero → valor).
      lines   : líneas no vacías.
      regex   : si el patrón tiene grupo, el entero del primer match; si no,
                la cantidad de matches.
      integer : el cuerpo completo es un entero.
      none    : sin conteo.

    Devuelve None si la respuesta no se puede interpretar.
    """
    if result_format == 'none':
        return None
    text = body.strip()
    try:
        if result_format == 'json':
            document = json.loads(text) if text else None
            if isinstance(document, list):
                return len(document)
            for key in result_keys or DEFAULT_RESULT_KEYS:
                value = _lookup(document, key)
                if isinstance(value, list):
                    return len(value)
                if isinstance(value, int) and not isinstance(value, bool):
                    return value
            return None
        if result_format == 'lines':
            return sum(1 for line in text.splitlines() if line.strip())
        if result_format == 'regex':
            pattern = re.compile(result_pattern or r"\S+")
            if pattern.groups:
                match = pattern.search(text)
                return int(match.group(1)) if match else None
            return len(pattern.findall(text))
        if result_format == 'integer':
            return int(text)
    except (ValueError, TypeError) as exc:
        logger.debug("[adapter] respuesta no interpretable como %s: %s", result_format, exc)
        return None
    raise ConfigError(f"result_format desconocido: {result_format!r}")


# =============================================================================
# Clase base abstracta
# =============================================================================

class Adapter(ABC):
    """
    Contrato común. Toda falla del backend sale como AdapterFailure,
    QueryTimeout o BackendUnreachable; nunca como excepción genérica.
    """

    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg
        self.connection = dict(cfg.connection)

    @property
    def name(self) -> str:
        return self.cfg.name

    def count_response(self, body: str) -> Optional[int]:
        return count_results(
            body,
            self.connection.get('result_format', 'json'),
            self.connection.get('result_keys') or DEFAULT_RESULT_KEYS,
            self.connection.get('result_pattern'),
        )

    @abstractmethod
    def ping(self) -> None:
        """Lanza BackendUnreachable si el backend no responde."""

    @abstractmethod
    def run(self, text: str, timeout: Optional[float] = None) -> AdapterResponse:
        """Ejecuta un texto de consulta completo y devuelve la respuesta drenada."""

    @abstractmethod
    def install(self, setup_text: str) -> None:
        """Instala un artefacto previo (idempotente)."""

    @abstractmethod
    def load(self, files: Sequence[Path]) -> None:
        """Carga archivos emitidos en la colección del backend."""

    @abstractmethod
    def count(self) -> int:
        """Cantidad de documentos en la colección."""

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


# =============================================================================
# CommandRunner
# =============================================================================

class CommandRunnerAdapter(Adapter):
    """
    Plantillas argv con marcadores:
        {query}       texto de la consulta
        {query_file}  archivo temporal con el texto
        {collection}  colección / base de datos
        {file}        archivo a cargar (sólo load_command)
    Una plantilla en cadena se divide con shlex.
    """

    def _template(self, key: str) -> Optional[list[str]]:
        template = self.connection.get(key)
        if template is None:
            return None
        return shlex.split(template) if isinstance(template, str) else [str(t) for t in template]

    def _invoke(self, key: str, timeout: float, query: str = "", file: str = "") -> str:
        template = self._template(key)
        if template is None:
            raise AdapterFailure(self.name, f"falta '{key}' en la configuración")
        query_file = None
        try:
            if any("{query_file}" in part for part in template):
                handle = tempfile.NamedTemporaryFile('w', encoding='utf-8', delete=False,
                                                     suffix=".query")
                with handle:
                    handle.write(query)
                query_file = handle.name
            argv = [
                part.replace("{query_file}", query_file or "")
                    .replace("{query}", query)
                    .replace("{collection}", self.cfg.collection)
                    .replace("{file}", file)
                for part in template
            ]
            completed = subprocess.run(argv, capture_output=True, text=True,
                                       encoding='utf-8', errors='replace', timeout=timeout)
        except subprocess.TimeoutExpired as exc:
            raise QueryTimeout(self.name, timeout) from exc
        except OSError as exc:
            raise AdapterFailure(self.name, str(exc)) from exc
        finally:
            if query_file is not None:
                os.unlink(query_file)
        if completed.returncode != 0:
            detail = (completed.stderr or completed.stdout).strip()
            raise AdapterFailure(self.name, f"código {completed.returncode}: {detail}")
        return completed.stdout

    def ping(self) -> None:
        if self.connection.get('ping_command') is None:
            executable = self._template('command')[0]
            if shutil.which(executable) is None:
                raise BackendUnreachable(self.name, f"'{executable}' no está en el PATH")
            return
        try:
            self._invoke('ping_command', PING_TIMEOUT)
        except (AdapterFailure, QueryTimeout) as exc:
            raise BackendUnreachable(self.name, str(exc)) from exc

    def run(self, text: str, timeout: Optional[float] = None) -> AdapterResponse:
        body = self._invoke('command', timeout or self.cfg.timeout, query=text)
        return AdapterResponse(body, self.count_response(body))

    def install(self, setup_text: str) -> None:
        self._invoke('setup_command', self.cfg.timeout, query=setup_text)

    def load(self, files: Sequence[Path]) -> None:
        for path in files:
            self._invoke('load_command', self.cfg.timeout, file=str(path))

    def count(self) -> int:
        body = self._invoke('count_command', self.cfg.timeout)
        try:
            return int(body.strip())
        except ValueError:
            raise AdapterFailure(self.name, f"conteo no entero: {body.strip()[:200]!r}")


# =============================================================================
# HttpEndpoint
# =============================================================================

def parse_raw_request(text: str) -> Optional[tuple[str, str, dict, str]]:
    """
    Interpreta un texto 'MÉTODO /ruta' + cabeceras + línea en blanco + cuerpo.
    Devuelve (método, ruta, cabeceras, cuerpo) o None si no tiene esa forma.
    """
    head, _, body = text.partition("\n\n")
    lines = head.split("\n")
    match = _RAW_REQUEST.match(lines[0].strip())
    if not match:
        return None
    headers = {}
    for line in lines[1:]:
        name, sep, value = line.partition(":")
        if sep:
            headers[name.strip()] = value.strip()
    return match.group(1), match.group(2), headers, body.rstrip("\n")


class HttpEndpointAdapter(Adapter):
    """
    Textos que empiezan con 'MÉTODO /ruta' se envían tal cual (CouchDB);
    el resto va como cuerpo de un POST a query_path, usando la plantilla
    query_body con {query} (texto crudo) o {query_json} (cadena JSON).
    """

    def __init__(self, cfg: BackendConfig):
        super().__init__(cfg)
        self.base_url = self.connection['url'].rstrip('/')
        self.session = requests.Session()
        if self.connection.get('user') is not None:
            self.session.auth = (self.connection['user'], self.connection.get('password') or "")
        self.session.headers.update(self.connection.get('headers') or {})

    def close(self) -> None:
        self.session.close()

    def _send(self, method: str, path: str, timeout: float, **kwargs) -> requests.Response:
        try:
            return self.session.request(method, self.base_url + path, timeout=timeout, **kwargs)
        except requests.Timeout as exc:
            raise QueryTimeout(self.name, timeout) from exc
        except requests.RequestException as exc:
            raise AdapterFailure(self.name, str(exc)) from exc

    def _request_for(self, text: str) -> tuple[str, str, dict, str]:
        raw = parse_raw_request(text)
        if raw is not None:
            return raw
        template = self.connection.get('query_body', "{query}")
        body = (template.replace("{query_json}", json.dumps(text))
                        .replace("{query}", text))
        headers = {"Content-Type": self.connection.get('query_content_type', "text/plain")}
        return "POST", self.connection.get('query_path', "/"), headers, body

    @staticmethod
    def _failure_text(response: requests.Response) -> str:
        return f"HTTP {response.status_code}: {response.text.strip()[:500]}"

    def ping(self) -> None:
        try:
            response = self.session.get(self.base_url + self.connection.get('ping_path', "/"),
                                        timeout=PING_TIMEOUT)
        except requests.RequestException as exc:
            raise BackendUnreachable(self.name, str(exc)) from exc
        if not response.ok:
            raise BackendUnreachable(self.name, self._failure_text(response))

    def run(self, text: str, timeout: Optional[float] = None) -> AdapterResponse:
        method, path, headers, body = self._request_for(text)
        response = self._send(method, path, timeout or self.cfg.timeout,
                              headers=headers, data=body.encode('utf-8') if body else None)
        payload = response.text  # cuerpo drenado dentro del intervalo medido
        if not response.ok:
            raise AdapterFailure(self.name, self._failure_text(response))
        return AdapterResponse(payload, self.count_response(payload))

    def install(self, setup_text: str) -> None:
        raw = parse_raw_request(setup_text)
        if raw is None:
            raise AdapterFailure(self.name, "el artefacto de instalación no es una petición HTTP")
        method, path, headers, body = raw
        response = self._send(method, path, self.cfg.timeout, headers=headers,
                              data=body.encode('utf-8') if body else None)
        if response.status_code == 409:
            logger.info("[adapter] %s: %s ya instalado", self.name, path)
            return
        if not response.ok:
            raise AdapterFailure(self.name, self._failure_text(response))

    def load(self, files: Sequence[Path]) -> None:
        load_format = self.connection.get('load_format', 'ndjson')
        if load_format == 'couch-bulk':
            self._load_couch_bulk(files)
            return
        content_type = "application/xml" if load_format == 'xml' else "application/x-ndjson"
        path = self.connection.get('load_path', "/_load")
        for file in files:
            with Path(file).open('rb') as fh:
                response = self._send("POST", path, self.cfg.timeout,
                                      headers={"Content-Type": content_type}, data=fh)
            if not response.ok:
                raise AdapterFailure(self.name, self._failure_text(response))

    def _load_couch_bulk(self, files: Sequence[Path]) -> None:
        database = f"/{self.cfg.collection}"
        response = self._send("PUT", database, self.cfg.timeout)
        if not response.ok and response.status_code != 412:  # 412: la base ya existe
            raise AdapterFailure(self.name, self._failure_text(response))
        path = self.connection.get('load_path', f"{database}/_bulk_docs")
        for file in files:
            with Path(file).open('r', encoding='utf-8') as fh:
                lines = (line for line in fh if line.strip())
                while True:
                    batch = [json.loads(line) for line in islice(lines, COUCH_BULK_BATCH)]
                    if not batch:
                        break
                    response = self._send("POST", path, self.cfg.timeout, json={"docs": batch})
                    if not response.ok:
                        raise AdapterFailure(self.name, self._failure_text(response))

    def count(self) -> int:
        request = self.connection.get('count_request', "GET /_count")
        raw = parse_raw_request(request)
        if raw is None:
            raise ConfigError(f"{self.name}: count_request inválido {request!r}")
        method, path, headers, body = raw
        response = self._send(method, path, self.cfg.timeout, headers=headers,
                              data=body.encode('utf-8') if body else None)
        if not response.ok:
            raise AdapterFailure(self.name, self._failure_text(response))
        try:
            value = _lookup(response.json(), self.connection.get('count_key', 'count'))
        except ValueError as exc:
            raise AdapterFailure(self.name, f"conteo ilegible: {exc}") from exc
        if not isinstance(value, int) or isinstance(value, bool):
            raise AdapterFailure(self.name, f"conteo ilegible: {response.text[:200]!r}")
        return value


# =============================================================================
# Fábrica
# =============================================================================

def create_adapter(cfg: BackendConfig) -> Adapter:
    if cfg.adapter_kind == AdapterKind.COMMAND_RUNNER:
        return CommandRunnerAdapter(cfg)
    return HttpEndpointAdapter(cfg)
