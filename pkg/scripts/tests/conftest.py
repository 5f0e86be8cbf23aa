"""
Fixtures compartidas: registros deterministas, fábrica de datasets
aleatorios, archivos canónicos temporales y un evaluador de fuerza bruta
escrito sin reutilizar el oráculo.
"""

import os
import sys
from collections import Counter

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.model import CanonicalRecord, RecordKind, VenueRef, VenueType  # noqa: E402
from scripts.utils.canonical_io import write_canonical  # noqa: E402


WORDS = [
    "database", "Database", "DATABASES", "text", "Text", "context", "mining",
    "Mining", "data-mining", "text-mining", "query", "systems", "graph", "neural",
    "streams", "XML", "index", "learning", "über", "naïve", "análisis", "σύστημα",
    "of", "for", "and", "a", "the", "on", "&", "<fast>",
]
AUTHORS = [f"Author {chr(65 + i % 26)}{i}" for i in range(60)] + ["José Núñez", "Zoë Ø"]


def build_records(n: int, seed: int) -> list[CanonicalRecord]:
    """Registros variados: los cuatro sub-tipos, 0–5 autores, títulos con los términos."""
    rng = np.random.default_rng(seed)
    kinds = list(RecordKind)
    records = []
    for i in range(n):
        kind = kinds[int(rng.integers(len(kinds)))]
        title = " ".join(WORDS[int(k)] for k in rng.integers(len(WORDS), size=int(rng.integers(1, 7))))
        authors = [AUTHORS[int(k)] for k in rng.integers(len(AUTHORS), size=int(rng.integers(0, 6)))]
        if authors and rng.random() < 0.05:
            authors.append(authors[0])  # mismo autor listado dos veces
        if i % 11 == 0:
            title = f"  {title} "
        if authors and i % 13 == 0:
            authors[-1] = f" {authors[-1]}\t"
        extra = {}
        if kind.is_article:
            if rng.random() < 0.9:
                venue_type = [VenueType.JOURNAL, VenueType.PROCEEDINGS, VenueType.SPECIAL_ISSUE][i % 3]
                extra['venue'] = VenueRef(
                    venue_title=f"Venue {i % 17}",
                    venue_type=venue_type,
                    volume=str(i % 40) if i % 2 else None,
                    issue=str(i % 5 + 1) if i % 3 == 0 else None,
                    issn="1234-5678" if i % 7 == 0 else None,
                )
        else:
            extra['isbn'] = f"978-0-{i:06d}" if i % 2 else None
            extra['editors'] = [AUTHORS[i % len(AUTHORS)]] if i % 4 == 0 else None
            extra['publisher'] = "Springer" if i % 3 else None
        records.append(CanonicalRecord(
            record_id=f"rec/{kind.value}/{i}",
            title=title,
            url=f"db/x/{i}.html" if i % 5 else None,
            year=int(rng.integers(1990, 2021)),
            authors=authors,
            kind=kind,
            pages=f"{i}-{i + 9}" if i % 2 == 0 else None,
            **extra,
        ))
    return records


@pytest.fixture(scope='session')
def fixture_records():
    """~1000 registros deterministas."""
    return build_records(1000, seed=20201)


@pytest.fixture
def random_records():
    """Fábrica: random_records(n, seed)."""
    return build_records


@pytest.fixture
def canonical_file(tmp_path):
    """Fábrica: escribe registros en un archivo canónico temporal y devuelve su ruta."""
    counter = iter(range(10 ** 6))

    def _write(records, name=None):
        path = tmp_path / (name or f"records_{next(counter)}.jsonl")
        write_canonical(path, records)
        return path
    return _write


# =============================================================================
# Evaluador de fuerza bruta
# =============================================================================

AND_IDS = {"Q2", "Q4", "Q8"}
OR_IDS = {"Q3", "Q5", "Q9"}


def _title_matches(q, title: str) -> bool:
    words = [t.term for t in q.terms]
    if not words:
        return True
    if q.case_sensitive:
        hits = [w in title for w in words]
    else:
        hits = [w.lower() in title.lower() for w in words]
    if q.id.value in OR_IDS:
        return any(hits)
    return all(hits)


def brute_force(records, q):
    """
    Selección: lista de (record_id, title).
    Agregación: dict clave → count sobre TODOS los pares (autor, registro)
    materializados primero y filtrados después.
    """
    if not q.is_aggregation:
        return [(r.record_id, r.title) for r in records if _title_matches(q, r.title)]
    pairs = [(author, r) for r in records for author in r.authors]
    by_year = q.id.value != "Q6"
    counts = Counter()
    for author, record in pairs:
        if _title_matches(q, record.title):
            counts[(author, record.year) if by_year else (author,)] += 1
    return dict(counts)


@pytest.fixture
def brute():
    return brute_force
