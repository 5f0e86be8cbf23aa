# --- config.py ---
# Configuración de backends: archivo YAML + variables de entorno.
#
#   backends:
#     basex:
#       adapter: command          # o http
#       dialect: XQuery31
#       timeout: 600
#       collection: dblp
#       connection: {...}         # claves propias de cada adaptador
#
# Sobrescrituras por entorno (BACKEND = nombre en mayúsculas, no alfanuméricos → _):
#   DODBENCH_<BACKEND>_URL, _USER, _PASSWORD, _COMMAND (se divide con shlex), _TIMEOUT

import logging
import os
import re
import shlex
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional

import yaml

from .exceptions import ConfigError, DataFileNotFoundError
from .translate import DEFAULT_COLLECTION, Dialect

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 600.0
ENV_PREFIX = "DODBENCH_"


class AdapterKind(str, Enum):
    COMMAND_RUNNER = "command"
    HTTP_ENDPOINT = "http"


COMMAND_KEYS = {
    'command', 'ping_command', 'load_command', 'count_command', 'setup_command',
    'result_format', 'result_pattern', 'result_keys',
}
HTTP_KEYS = {
    'url', 'user', 'password', 'headers', 'query_path', 'query_body',
    'query_content_type', 'ping_path', 'load_path', 'load_format',
    'count_request', 'count_key', 'result_format', 'result_keys', 'result_pattern',
}
RESULT_FORMATS = ('json', 'lines', 'regex', 'integer', 'none')
LOAD_FORMATS = ('ndjson', 'couch-bulk', 'xml')


@dataclass(frozen=True, slots=True)
class BackendConfig:
    """
    Un backend declarado. connection guarda las claves del adaptador
    (url/credenciales o plantillas de comando).
    """
    name: str
    adapter_kind: AdapterKind
    dialect: Dialect
    connection: Mapping = field(default_factory=dict)
    timeout: float = DEFAULT_TIMEOUT
    collection: str = DEFAULT_COLLECTION

    def __post_init__(self):
        if not self.name:
            raise ConfigError("backend sin nombre")
        if not isinstance(self.timeout, (int, float)) or self.timeout <= 0:
            raise ConfigError(f"{self.name}: timeout debe ser positivo, no {self.timeout!r}")
        allowed = COMMAND_KEYS if self.adapter_kind == AdapterKind.COMMAND_RUNNER else HTTP_KEYS
        unknown = set(self.connection) - allowed
        if unknown:
            raise ConfigError(f"{self.name}: claves de conexión desconocidas {sorted(unknown)}")
        fmt = self.connection.get('result_format')
        if fmt is not None and fmt not in RESULT_FORMATS:
            raise ConfigError(f"{self.name}: result_format '{fmt}' no es uno de {RESULT_FORMATS}")
        load_format = self.connection.get('load_format')
        if load_format is not None and load_format not in LOAD_FORMATS:
            raise ConfigError(f"{self.name}: load_format '{load_format}' no es uno de {LOAD_FORMATS}")
        if self.adapter_kind == AdapterKind.COMMAND_RUNNER and not self.connection.get('command'):
            raise ConfigError(f"{self.name}: el adaptador command requiere 'command'")
        if self.adapter_kind == AdapterKind.HTTP_ENDPOINT and not self.connection.get('url'):
            raise ConfigError(f"{self.name}: el adaptador http requiere 'url'")

    @property
    def env_prefix(self) -> str:
        return env_prefix(self.name)


def env_prefix(name: str) -> str:
    return ENV_PREFIX + re.sub(r"[^A-Za-z0-9]", "_", name).upper() + "_"


def _apply_env(name: str, entry: dict, env: Mapping[str, str]) -> dict:
    prefix = env_prefix(name)
    entry = dict(entry)
    connection = dict(entry.get('connection') or {})
    for key in ('url', 'user', 'password'):
        if prefix + key.upper() in env:
            connection[key] = env[prefix + key.upper()]
            logger.debug("[config] %s.%s sobrescrito por %s%s", name, key, prefix, key.upper())
    if prefix + "COMMAND" in env:
        connection['command'] = shlex.split(env[prefix + "COMMAND"])
    if prefix + "TIMEOUT" in env:
        try:
            entry['timeout'] = float(env[prefix + "TIMEOUT"])
        except ValueError:
            raise ConfigError(f"{prefix}TIMEOUT no es un número: {env[prefix + 'TIMEOUT']!r}")
    entry['connection'] = connection
    return entry


def backend_from_mapping(name: str, entry: Mapping, env: Optional[Mapping[str, str]] = None) -> BackendConfig:
    """Construye un BackendConfig desde una entrada del YAML ya leída."""
    if not isinstance(entry, Mapping):
        raise ConfigError(f"{name}: la entrada debe ser un mapeo")
    entry = _apply_env(name, entry, os.environ if env is None else env)
    try:
        kind = AdapterKind(entry.get('adapter'))
    except ValueError:
        raise ConfigError(f"{name}: adapter debe ser 'command' o 'http', no {entry.get('adapter')!r}")
    try:
        dialect = Dialect(entry.get('dialect'))
    except ValueError:
        raise ConfigError(f"{name}: dialecto desconocido {entry.get('dialect')!r}")
    return BackendConfig(
        name=name,
        adapter_kind=kind,
        dialect=dialect,
        connection=entry['connection'],
        timeout=entry.get('timeout', DEFAULT_TIMEOUT),
        collection=entry.get('collection', DEFAULT_COLLECTION),
    )


def load_config(path, env: Optional[Mapping[str, str]] = None) -> dict[str, BackendConfig]:
    """
    Lee el YAML de backends.

    Devuelve
    --------
    dict nombre → BackendConfig, en el orden del archivo.

    Lanza
    -----
    DataFileNotFoundError si el archivo no existe; ConfigError si es inválido.
    """
    path = Path(path)
    if not path.exists():
        raise DataFileNotFoundError(path, "Ver configs/backends.yaml como ejemplo.")
    try:
        with path.open('r', encoding='utf-8') as fh:
            document = yaml.safe_load(fh) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML inválido ({exc})") from exc
    backends = document.get('backends') if isinstance(document, dict) else None
    if not isinstance(backends, dict) or not backends:
        raise ConfigError(f"{path}: falta la sección 'backends'")
    return {name: backend_from_mapping(name, entry, env) for name, entry in backends.items()}


def select_backend(configs: Mapping[str, BackendConfig], name: str) -> BackendConfig:
    if name not in configs:
        raise ConfigError(f"backend '{name}' no declarado; disponibles: {', '.join(configs)}")
    return configs[name]
