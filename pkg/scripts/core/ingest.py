# --- ingest.py ---
# Ingesta en streaming de XML estilo DBLP → registros canónicos.
#
# El archivo DBLP completo pesa varios GB: nunca se construye el árbol entero.
# lxml.etree.iterparse entrega eventos start/end; cada publicación (hijo
# directo de la raíz) se convierte en CanonicalRecord al cerrarse y luego se
# borra del árbol junto con sus hermanos previos. La memoria pico queda
# acotada por UNA publicación, no por el archivo.
#
# Pipeline de generadores:
#   iter_publications(fh) → (registro | None, motivo) → ingest_stream(sink)

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

from lxml import etree
from tqdm import tqdm

from .decorators import validate_parameters
from .exceptions import DataFileNotFoundError, InvalidParameterError, MalformedXml, OversizedElement
from .model import CanonicalRecord, RecordKind, VenueRef, VenueType, validate_record

logger = logging.getLogger(__name__)


# =============================================================================
# Parámetros de ingesta
# =============================================================================

MAX_ELEMENT_BYTES = 1 << 20   # 1 MiB por publicación
READ_SLACK = 1 << 20          # holgura por lectura en bloques del parser

# Los cuatro tipos DBLP que corresponden uno a uno con los sub-tipos del modelo.
KIND_TABLE = {
    "article": RecordKind.JOURNAL_ARTICLE,
    "inproceedings": RecordKind.CONFERENCE_ARTICLE,
    "book": RecordKind.BOOK,
    "incollection": RecordKind.BOOK_CHAPTER,
}

# map_kind() devuelve UNMAPPED para cualquier otro elemento (www, phdthesis, ...).
UNMAPPED = None

# Motivos de descarte (claves de IngestStats.skip_reasons)
SKIP_UNMAPPED = "unmapped kind"
SKIP_MISSING_KEY = "missing key"
SKIP_MISSING_YEAR = "missing year"
SKIP_INVALID_YEAR = "invalid year"
SKIP_EMPTY_TITLE = "empty title"
SKIP_INVALID = "invalid record"


@dataclass
class IngestStats:
    """
    Totales de una ingesta. Invariante:
        records_accepted + records_skipped = publicaciones encontradas
    """
    records_accepted: int = 0
    records_skipped: int = 0
    skip_reasons: Counter = field(default_factory=Counter)
    bytes_read: int = 0

    @property
    def total(self) -> int:
        return self.records_accepted + self.records_skipped

    def skip(self, reason: str) -> None:
        self.records_skipped += 1
        self.skip_reasons[reason] += 1

    def as_dict(self) -> dict:
        return {
            "records_accepted": self.records_accepted,
            "records_skipped": self.records_skipped,
            "skip_reasons": dict(sorted(self.skip_reasons.items())),
            "bytes_read": self.bytes_read,
        }


def map_kind(element_name: str, attributes: Optional[dict] = None) -> Optional[RecordKind]:
    """
    Tabla de sub-tipos: article → JournalArticle, inproceedings →
    ConferenceArticle, book → Book, incollection → BookChapter; el resto UNMAPPED.

    attributes (p. ej. publtype) no altera el mapeo; se acepta para que el
    llamador pase el elemento tal como viene del parser.
    """
    if not element_name:
        raise InvalidParameterError('element_name', element_name, "no puede ser vacío")
    return KIND_TABLE.get(element_name, UNMAPPED)


class CountingReader:
    """
    Envoltorio de un flujo binario que cuenta los bytes entregados al parser.
    Sirve para reportar el offset de un error y para el tope por elemento.
    """

    def __init__(self, raw):
        self._raw = raw
        self.bytes_read = 0

    @property
    def name(self):
        # lxml usa el nombre como URL base para resolver el DTD externo
        return getattr(self._raw, 'name', None)

    def read(self, size: int = -1) -> bytes:
        data = self._raw.read(size)
        self.bytes_read += len(data)
        return data


def _flat_text(elem) -> str:
    """Texto plano de un elemento con marcado interno (<i>, <sub>, ...), sin recortar."""
    return "".join(elem.itertext())


def element_to_record(elem, kind: RecordKind) -> tuple[Optional[CanonicalRecord], Optional[str]]:
    """
    Convierte un elemento de publicación en registro canónico.

    Devuelve
    --------
    (registro, None) si es aceptado; (None, motivo) si se descarta.
    """
    key = elem.get('key')
    if not key:
        return None, SKIP_MISSING_KEY

    title = None
    year_text = None
    url = None
    ee = None
    authors = []
    editors = []
    fields = {}
    venue_title = None
    venue_type = None
    venue_fields = {}

    for child in elem:
        tag = child.tag
        if not isinstance(tag, str):
            continue  # comentarios e instrucciones de procesamiento
        if tag == 'author':
            authors.append(_flat_text(child))
        elif tag == 'editor':
            editors.append(_flat_text(child))
        elif tag == 'title':
            title = _flat_text(child)
        elif tag == 'year':
            year_text = _flat_text(child)
        elif tag == 'url' and url is None:
            url = _flat_text(child)
        elif tag == 'ee' and ee is None:
            ee = _flat_text(child)
        elif tag in ('pages', 'publisher', 'isbn') and tag not in fields:
            fields[tag] = _flat_text(child)
        elif tag == 'journal' and venue_title is None:
            venue_title = _flat_text(child)
            special = child.get('type') == 'special'
            venue_type = VenueType.SPECIAL_ISSUE if special else VenueType.JOURNAL
        elif tag == 'booktitle' and venue_title is None:
            venue_title = _flat_text(child)
            venue_type = VenueType.PROCEEDINGS
        elif tag in ('volume', 'issn') and tag not in venue_fields:
            venue_fields[tag] = _flat_text(child)
        elif tag == 'number' and 'issue' not in venue_fields:
            venue_fields['issue'] = _flat_text(child)

    if not title or not title.strip():
        return None, SKIP_EMPTY_TITLE
    if not year_text or not year_text.strip():
        return None, SKIP_MISSING_YEAR
    try:
        year = int(year_text)
    except ValueError:
        return None, SKIP_INVALID_YEAR

    venue = None
    if kind.is_article and venue_title:
        venue = VenueRef(venue_title=venue_title, venue_type=venue_type, **venue_fields)

    record = CanonicalRecord(
        record_id=key,
        title=title,
        url=url if url else ee,
        year=year,
        authors=authors,
        kind=kind,
        pages=fields.get('pages'),
        venue=venue,
        publisher=fields.get('publisher'),
        editors=editors if kind.is_book else None,
        isbn=fields.get('isbn') if kind.is_book else None,
    )
    result = validate_record(record)
    if not result.ok:
        logger.debug("registro %s descartado: %s", key, ", ".join(result.violations))
        return None, SKIP_INVALID
    return record, None


def _release(elem) -> None:
    """Libera el elemento procesado y los hermanos anteriores ya vistos."""
    elem.clear(keep_tail=False)
    parent = elem.getparent()
    if parent is not None:
        while elem.getprevious() is not None:
            del parent[0]


def iter_publications(
    xml_input,
    stats: IngestStats,
    max_element_bytes: int = MAX_ELEMENT_BYTES,
) -> Iterator[CanonicalRecord]:
    """
    Generador de registros aceptados en orden de documento. Actualiza stats
    in situ (aceptados, descartados por motivo, bytes leídos).

    Lanza
    -----
    MalformedXml       XML mal formado (con offset en bytes).
    OversizedElement   una publicación supera max_element_bytes.
    """
    reader = CountingReader(xml_input)
    context = etree.iterparse(
        reader,
        events=('start', 'end'),
        load_dtd=True,          # sólo para resolver entidades (&uuml; ...)
        no_network=True,
        resolve_entities=True,
        remove_comments=True,
    )
    depth = 0
    element_start = 0

    try:
        for event, elem in context:
            if event == 'start':
                depth += 1
                if depth == 2:
                    element_start = reader.bytes_read
                continue

            if depth > 2:
                consumed = reader.bytes_read - element_start
                if consumed > max_element_bytes + READ_SLACK:
                    raise OversizedElement(consumed, max_element_bytes)
            elif depth == 2:
                size = len(etree.tostring(elem, encoding='utf-8', with_tail=False))
                if size > max_element_bytes:
                    raise OversizedElement(size, max_element_bytes, elem.get('key'))

                kind = map_kind(elem.tag, dict(elem.attrib))
                if kind is UNMAPPED:
                    stats.skip(SKIP_UNMAPPED)
                else:
                    record, reason = element_to_record(elem, kind)
                    if record is None:
                        stats.skip(reason)
                    else:
                        stats.records_accepted += 1
                        stats.bytes_read = reader.bytes_read
                        yield record
                _release(elem)
            depth -= 1
    except etree.XMLSyntaxError as exc:
        line, column = getattr(exc, 'position', (None, None))
        raise MalformedXml(reader.bytes_read, line, column, str(exc)) from exc
    finally:
        stats.bytes_read = reader.bytes_read


@validate_parameters(
    ('max_element_bytes', lambda v: v > 0, "debe ser un número positivo de bytes"),
)
def ingest_stream(
    xml_input,
    sink: Callable[[CanonicalRecord], None],
    max_element_bytes: int = MAX_ELEMENT_BYTES,
    progress: bool = False,
) -> IngestStats:
    """
    Entrega cada publicación válida al sink exactamente una vez, en orden.

    Parámetros
    ----------
    xml_input : flujo binario o ruta
        XML bien formado; publicaciones como secuencia plana bajo una raíz.
    sink : callable(CanonicalRecord)
        Consumidor. Puede pasar los registros a otro hilo; el parser es
        de un solo hilo.
    max_element_bytes : int
        Tope por publicación (por defecto 1 MiB).
    progress : bool
        Barra de progreso tqdm en bytes (sólo para rutas).

    Devuelve
    --------
    IngestStats
    """
    stats = IngestStats()
    if isinstance(xml_input, (str, Path)):
        path = Path(xml_input)
        if not path.is_file():
            raise DataFileNotFoundError(path, "Se espera el volcado dblp.xml (con dblp.dtd al lado).")
        bar = tqdm(total=path.stat().st_size, unit='B', unit_scale=True,
                   desc="ingest", disable=not progress)
        with path.open('rb') as fh, bar:
            for record in iter_publications(fh, stats, max_element_bytes):
                sink(record)
                bar.update(stats.bytes_read - bar.n)
            bar.update(stats.bytes_read - bar.n)
    else:
        for record in iter_publications(xml_input, stats, max_element_bytes):
            sink(record)

    empty_titles = stats.skip_reasons.get(SKIP_EMPTY_TITLE, 0)
    if empty_titles:
        logger.warning("[ingest] %d registro(s) rechazados por título vacío", empty_titles)
    logger.info("[ingest] aceptados=%d descartados=%d bytes=%d",
                stats.records_accepted, stats.records_skipped, stats.bytes_read)
    return stats
