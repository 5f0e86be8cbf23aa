# --- datagen.py ---
# Generación de los subconjuntos por factor de escala y emisión XML / JSON.
#
# Subconjuntos ANIDADOS: una única permutación sembrada de los índices de
# registro; el subconjunto de tamaño k toma el prefijo de largo k. Así, para
# la misma semilla, SF=0.125 ⊆ 0.25 ⊆ 0.5 ⊆ 1.0 y las curvas de escalamiento
# son monótonas en volumen de datos.
#
# Emisión en streaming (un elemento / una línea por registro):
#   - XML: raíz única que envuelve los registros; la etiqueta codifica el
#     sub-tipo (article, inproceedings, book, incollection); varios autores
#     como etiquetas <author> repetidas.
#   - JSON: un documento por línea; los autores son la lista `authors`.

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import islice
from pathlib import Path
from typing import Iterable, Union

import numpy as np
from lxml import etree

from scripts.utils.canonical_io import count_records, iter_records

from .decorators import log_stage, timer, validate_parameters
from .exceptions import DataFileNotFoundError, IoFailure
from .ingest import KIND_TABLE
from .model import CanonicalRecord, ScaleFactor, VenueRef, VenueType

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
XML_ROOT = "dblp"
TAG_FOR_KIND = {kind: tag for tag, kind in KIND_TABLE.items()}
KIND_FOR_TAG = dict(KIND_TABLE)

RecordSource = Union[str, Path, Iterable[CanonicalRecord]]


# =============================================================================
# Subconjuntos por factor de escala
# =============================================================================

def subset_size(n: int, sf: ScaleFactor) -> int:
    """
    round(N·sf) con redondeo half-up: 6 150 738 → 768 842 / 1 537 685 /
    3 075 369 / 6 150 738. Los cuatro SF son diádicos, así que N·sf es exacto.
    """
    return int(math.floor(n * sf.value + 0.5))


def select_indices(n: int, sf: ScaleFactor, seed: int = DEFAULT_SEED) -> np.ndarray:
    """
    Índices (ordenados) de los registros elegidos para sf.
    Prefijo de np.random.default_rng(seed).permutation(n).
    """
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:subset_size(n, sf)])


@timer
@log_stage('sf', 'seed')
def subset(records, sf: ScaleFactor, seed: int = DEFAULT_SEED, out=None) -> Path:
    """
    Escribe el subconjunto de `records` (archivo canónico) para sf.

    Las líneas se copian tal cual y en el orden original: con sf=1.0 la
    salida es idéntica byte a byte a la entrada.

    Devuelve
    --------
    Path del archivo canónico escrito.
    """
    if not isinstance(sf, ScaleFactor):
        sf = ScaleFactor(sf)
    src = Path(records)
    if not src.exists():
        raise DataFileNotFoundError(src, "Ejecuta primero run_ingest.py.")
    dst = Path(out) if out is not None else src.with_name(f"{src.stem}_sf{sf}{src.suffix}")

    n = count_records(src)
    mask = np.zeros(n, dtype=bool)
    mask[select_indices(n, sf, seed)] = True

    written = 0
    try:
        dst.parent.mkdir(parents=True, exist_ok=True)
        with src.open('r', encoding='utf-8') as fin, \
                dst.open('w', encoding='utf-8', newline='\n') as fout:
            idx = 0
            for line in fin:
                if not line.strip():
                    continue
                if mask[idx]:
                    fout.write(line if line.endswith('\n') else line + '\n')
                    written += 1
                idx += 1
    except OSError as exc:
        raise IoFailure(dst, str(exc)) from exc

    logger.info("[datagen] SF=%s seed=%d → %d de %d registros", sf, seed, written, n)
    return dst


# =============================================================================
# Representación XML
# =============================================================================

def record_to_element(record: CanonicalRecord):
    """Elemento XML de un registro; los campos ausentes no se emiten."""
    elem = etree.Element(TAG_FOR_KIND[record.kind], key=record.record_id)
    for name in record.authors:
        etree.SubElement(elem, 'author').text = name
    for name in record.editors or ():
        etree.SubElement(elem, 'editor').text = name
    etree.SubElement(elem, 'title').text = record.title
    if record.pages is not None:
        etree.SubElement(elem, 'pages').text = record.pages
    etree.SubElement(elem, 'year').text = str(record.year)

    venue = record.venue
    if venue is not None:
        if venue.volume is not None:
            etree.SubElement(elem, 'volume').text = venue.volume
        if venue.venue_type == VenueType.PROCEEDINGS:
            etree.SubElement(elem, 'booktitle').text = venue.venue_title
        else:
            journal = etree.SubElement(elem, 'journal')
            journal.text = venue.venue_title
            if venue.venue_type == VenueType.SPECIAL_ISSUE:
                journal.set('type', 'special')
        if venue.issue is not None:
            etree.SubElement(elem, 'number').text = venue.issue
        if venue.issn is not None:
            etree.SubElement(elem, 'issn').text = venue.issn

    if record.publisher is not None:
        etree.SubElement(elem, 'publisher').text = record.publisher
    if record.isbn is not None:
        etree.SubElement(elem, 'isbn').text = record.isbn
    if record.url is not None:
        etree.SubElement(elem, 'url').text = record.url
    return elem


def _write_xml(path: Path, records: Iterable[CanonicalRecord]) -> int:
    count = 0
    try:
        with etree.xmlfile(str(path), encoding='utf-8') as xf:
            xf.write_declaration()
            with xf.element(XML_ROOT):
                xf.write('\n')
                for record in records:
                    xf.write(record_to_element(record))
                    xf.write('\n')
                    count += 1
    except (OSError, ValueError) as exc:
        # ValueError: texto con caracteres no representables en XML
        raise IoFailure(path, str(exc)) from exc
    return count


# =============================================================================
# Representación JSON
# =============================================================================

def record_to_document(record: CanonicalRecord) -> dict:
    """
    Documento JSON de un registro: campos escalares como etiquetas de primer
    nivel, autores como lista `authors`, venue como documento anidado.
    """
    doc = {
        "_id": record.record_id,
        "type": TAG_FOR_KIND[record.kind],
        "title": record.title,
        "authors": list(record.authors),
        "year": record.year,
    }
    if record.url is not None:
        doc["url"] = record.url
    if record.pages is not None:
        doc["pages"] = record.pages
    venue = record.venue
    if venue is not None:
        doc["venue"] = {"title": venue.venue_title, "type": venue.venue_type.value}
        for name in ('issn', 'volume', 'issue'):
            if getattr(venue, name) is not None:
                doc["venue"][name] = getattr(venue, name)
    if record.publisher is not None:
        doc["publisher"] = record.publisher
    if record.editors is not None:
        doc["editors"] = list(record.editors)
    if record.isbn is not None:
        doc["isbn"] = record.isbn
    return doc


def parse_json_document(doc: dict) -> CanonicalRecord:
    """Inverso de record_to_document()."""
    venue_doc = doc.get("venue")
    venue = None
    if venue_doc is not None:
        venue = VenueRef(
            venue_title=venue_doc["title"],
            venue_type=VenueType(venue_doc.get("type", VenueType.JOURNAL.value)),
            issn=venue_doc.get("issn"),
            volume=venue_doc.get("volume"),
            issue=venue_doc.get("issue"),
        )
    return CanonicalRecord(
        record_id=doc["_id"],
        title=doc["title"],
        url=doc.get("url"),
        year=doc["year"],
        authors=doc.get("authors", []),
        kind=KIND_FOR_TAG[doc["type"]],
        pages=doc.get("pages"),
        venue=venue,
        publisher=doc.get("publisher"),
        editors=doc.get("editors"),
        isbn=doc.get("isbn"),
    )


def _write_json(path: Path, records: Iterable[CanonicalRecord]) -> int:
    count = 0
    try:
        with path.open('w', encoding='utf-8', newline='\n') as fh:
            for record in records:
                fh.write(json.dumps(record_to_document(record), ensure_ascii=False))
                fh.write('\n')
                count += 1
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return count


# =============================================================================
# Emisión con shards por rangos de registros
# =============================================================================

def _record_ranges(total: int, shards: int) -> list[tuple[int, int]]:
    step = math.ceil(total / shards) if total else 0
    return [(i * step, min(total, (i + 1) * step)) for i in range(shards)]


def _emit(records: RecordSource, out, shards: int, suffix: str, writer) -> list[Path]:
    out = Path(out)
    single_file = shards == 1 and out.suffix in (suffix, '.jsonl' if suffix == '.json' else suffix)

    if single_file:
        out.parent.mkdir(parents=True, exist_ok=True)
        source = iter_records(records) if isinstance(records, (str, Path)) else records
        count = writer(out, source)
        logger.info("[datagen] %d registros → %s", count, out)
        return [out]

    out.mkdir(parents=True, exist_ok=True)
    if isinstance(records, (str, Path)):
        total = count_records(records)

        def shard_source(start, stop):
            return islice(iter_records(records), start, stop)
    else:
        materialized = list(records)
        total = len(materialized)

        def shard_source(start, stop):
            return iter(materialized[start:stop])

    paths = [out / f"part-{i:05d}{suffix}" for i in range(shards)]
    # Cada archivo lo escribe exactamente un hilo.
    with ThreadPoolExecutor(max_workers=shards) as pool:
        futures = [
            pool.submit(writer, path, shard_source(start, stop))
            for path, (start, stop) in zip(paths, _record_ranges(total, shards))
        ]
        counts = [f.result() for f in futures]
    logger.info("[datagen] %d registros → %d archivo(s) en %s", sum(counts), len(paths), out)
    return paths


@timer
@validate_parameters(('shards', lambda v: isinstance(v, int) and v >= 1, "debe ser >= 1"))
def emit_xml(records: RecordSource, out, shards: int = 1) -> list[Path]:
    """
    Emite los registros como XML.

    out con sufijo .xml y shards=1 → un único archivo; en otro caso out es un
    directorio con part-NNNNN.xml (un rango contiguo de registros por archivo).
    """
    return _emit(records, out, shards, '.xml', _write_xml)


@timer
@validate_parameters(('shards', lambda v: isinstance(v, int) and v >= 1, "debe ser >= 1"))
def emit_json(records: RecordSource, out, shards: int = 1) -> list[Path]:
    """Como emit_xml, con un documento JSON por línea (.json / .jsonl)."""
    return _emit(records, out, shards, '.json', _write_json)


def read_json_documents(path) -> Iterable[CanonicalRecord]:
    """Generador de registros desde un archivo JSON emitido (una línea por documento)."""
    with Path(path).open('r', encoding='utf-8') as fh:
        for line in fh:
            if line.strip():
                yield parse_json_document(json.loads(line))


def generate(records, sf: ScaleFactor, seed: int, out_dir, formats=('xml', 'json'),
             shards: int = 1) -> dict:
    """
    Subconjunto + emisión para un SF. Devuelve {'canonical': Path,
    'xml': [Path...], 'json': [Path...]} según los formatos pedidos.
    """
    out_dir = Path(out_dir)
    canonical = subset(records, sf, seed, out_dir / f"dblp_sf{sf}.jsonl")
    produced = {'canonical': canonical}
    if 'xml' in formats:
        target = out_dir / f"dblp_sf{sf}.xml" if shards == 1 else out_dir / f"xml_sf{sf}"
        produced['xml'] = emit_xml(canonical, target, shards=shards)
    if 'json' in formats:
        target = out_dir / f"dblp_sf{sf}.json" if shards == 1 else out_dir / f"json_sf{sf}"
        produced['json'] = emit_json(canonical, target, shards=shards)
    return produced
