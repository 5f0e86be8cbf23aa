# --- canonical_io.py ---
# Lectura y escritura del archivo canónico: un registro JSON por línea,
# UTF-8, con los nombres de campo de CanonicalRecord.
# Es el contrato entre ingesta, generación de datos y oráculo.

import json
from pathlib import Path
from typing import Iterator

from scripts.core.exceptions import CorruptRecord, DataFileNotFoundError, IoFailure
from scripts.core.model import CanonicalRecord


def encode_record(record: CanonicalRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False, separators=(',', ':'))


def decode_record(line: str, line_number: int) -> CanonicalRecord:
    try:
        return CanonicalRecord.from_dict(json.loads(line))
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise CorruptRecord(line_number, f"{type(exc).__name__}: {exc}") from exc


def read_canonical(path) -> Iterator[tuple[int, CanonicalRecord]]:
    """
    Generador perezoso de (número_de_línea, registro).
    Las líneas en blanco se ignoran; una línea ilegible lanza CorruptRecord.
    """
    path = Path(path)
    if not path.exists():
        raise DataFileNotFoundError(path, "Ejecuta primero run_ingest.py o run_datagen.py.")
    with path.open('r', encoding='utf-8') as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield line_number, decode_record(line, line_number)


def iter_records(path) -> Iterator[CanonicalRecord]:
    for _, record in read_canonical(path):
        yield record


def count_records(path) -> int:
    """Cuenta registros sin decodificarlos (una pasada por el archivo)."""
    path = Path(path)
    if not path.exists():
        raise DataFileNotFoundError(path, "Ejecuta primero run_ingest.py o run_datagen.py.")
    with path.open('r', encoding='utf-8') as fh:
        return sum(1 for line in fh if line.strip())


class CanonicalWriter:
    """
    Escritor del formato canónico como context manager; se usa como sink
    de la ingesta: `with CanonicalWriter(out) as sink: ingest_stream(fh, sink)`.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.written = 0
        self._fh = None

    def __enter__(self) -> 'CanonicalWriter':
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open('w', encoding='utf-8', newline='\n')
        except OSError as exc:
            raise IoFailure(self.path, str(exc)) from exc
        return self

    def __call__(self, record: CanonicalRecord) -> None:
        self.write(record)

    def write(self, record: CanonicalRecord) -> None:
        try:
            self._fh.write(encode_record(record))
            self._fh.write('\n')
        except OSError as exc:
            raise IoFailure(self.path, str(exc)) from exc
        self.written += 1

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def write_canonical(path, records) -> int:
    with CanonicalWriter(path) as writer:
        for record in records:
            writer.write(record)
    return writer.written
