# --- model.py ---
# Modelo de datos canónico del benchmark: una publicación DBLP desnormalizada.
#
# El diagrama entidad-relación (Authors, Records, Books, Articles, Journals,
# Publishers) colapsa en un único tipo de registro con listas anidadas:
# los autores son una tupla ordenada, la revista/congreso un VenueRef embebido.
# Es la forma documental que se mide, no una forma relacional.
#
# Conceptos aplicados (igual que en el resto de core/):
#   - @dataclass(frozen=True, slots=True, kw_only=True): valores inmutables,
#     hashables y livianos; se pueden compartir entre hilos sin copias.
#   - Enum con valor str: el valor es exactamente el texto del formato canónico.
#   - __post_init__ normaliza (listas → tuplas, "" → ausente) sin validar:
#     la validación devuelve datos (violaciones), no lanza excepciones.

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .exceptions import InvalidParameterError, InvalidScaleFactor


class RecordKind(str, Enum):
    """Sub-tipo de un registro (relación IsA)."""
    JOURNAL_ARTICLE = "JournalArticle"
    CONFERENCE_ARTICLE = "ConferenceArticle"
    BOOK = "Book"
    BOOK_CHAPTER = "BookChapter"

    @property
    def is_article(self) -> bool:
        return self in (RecordKind.JOURNAL_ARTICLE, RecordKind.CONFERENCE_ARTICLE)

    @property
    def is_book(self) -> bool:
        return not self.is_article


class VenueType(str, Enum):
    JOURNAL = "Journal"
    PROCEEDINGS = "Proceedings"
    SPECIAL_ISSUE = "SpecialIssue"


def _absent_if_empty(value):
    """'' y listas vacías se representan como ausentes (None)."""
    if value is None:
        return None
    if isinstance(value, str):
        return value if value != "" else None
    return tuple(value) if len(value) > 0 else None


@dataclass(frozen=True, slots=True, kw_only=True)
class VenueRef:
    """
    Lugar de publicación de un artículo (entidad Journals).

    venue_title : título de la revista o nombre del congreso (no vacío).
    venue_type  : Journal, Proceedings o SpecialIssue.
    issn, volume, issue : opcionales.
    """
    venue_title: str
    venue_type: VenueType = VenueType.JOURNAL
    issn: Optional[str] = None
    volume: Optional[str] = None
    issue: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.venue_type, str) and not isinstance(self.venue_type, VenueType):
            try:
                object.__setattr__(self, 'venue_type', VenueType(self.venue_type))
            except ValueError:
                pass  # validate_record lo reporta
        for name in ('issn', 'volume', 'issue'):
            object.__setattr__(self, name, _absent_if_empty(getattr(self, name)))

    def to_dict(self) -> dict:
        out = {"venue_title": self.venue_title, "venue_type": _enum_text(self.venue_type)}
        for name in ('issn', 'volume', 'issue'):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> 'VenueRef':
        unknown = set(data) - {'venue_title', 'venue_type', 'issn', 'volume', 'issue'}
        if unknown:
            raise ValueError(f"campos desconocidos en venue: {sorted(unknown)}")
        return cls(
            venue_title=data['venue_title'],
            venue_type=VenueType(data.get('venue_type', VenueType.JOURNAL.value)),
            issn=data.get('issn'),
            volume=data.get('volume'),
            issue=data.get('issue'),
        )


# Orden de los campos en el formato canónico (una línea JSON por registro).
CANONICAL_FIELDS = (
    'record_id', 'title', 'url', 'year', 'authors', 'kind',
    'pages', 'venue', 'publisher', 'editors', 'isbn',
)


@dataclass(frozen=True, slots=True, kw_only=True)
class CanonicalRecord:
    """
    Una publicación con sus autores, sub-tipo, lugar y año.

    Ejemplo
    -------
    >>> rec = CanonicalRecord(record_id="journals/x/A99", title="Database systems",
    ...                       year=1999, authors=["A", "B"],
    ...                       kind=RecordKind.JOURNAL_ARTICLE)
    >>> rec.authors
    ('A', 'B')
    """
    record_id: str
    title: str
    url: Optional[str] = None
    year: int
    authors: tuple[str, ...] = field(default_factory=tuple)
    kind: RecordKind
    pages: Optional[str] = None
    venue: Optional[VenueRef] = None
    publisher: Optional[str] = None
    editors: Optional[tuple[str, ...]] = None
    isbn: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'authors', tuple(self.authors))
        if isinstance(self.kind, str) and not isinstance(self.kind, RecordKind):
            try:
                object.__setattr__(self, 'kind', RecordKind(self.kind))
            except ValueError:
                pass  # validate_record lo reporta
        for name in ('url', 'pages', 'publisher', 'isbn', 'editors'):
            object.__setattr__(self, name, _absent_if_empty(getattr(self, name)))

    @property
    def author_count(self) -> int:
        return len(self.authors)

    def to_dict(self) -> dict:
        """Mapeo del formato canónico; los campos ausentes se omiten."""
        out = {}
        for name in CANONICAL_FIELDS:
            value = getattr(self, name)
            if value is None:
                continue
            if name in ('authors', 'editors'):
                value = list(value)
            elif name == 'kind':
                value = _enum_text(value)
            elif name == 'venue':
                value = value.to_dict()
            out[name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> 'CanonicalRecord':
        """
        Inverso de to_dict(). Lanza KeyError/ValueError/TypeError ante datos
        incompletos; el llamador los convierte en CorruptRecord con el número
        de línea.
        """
        unknown = set(data) - set(CANONICAL_FIELDS)
        if unknown:
            raise ValueError(f"campos desconocidos: {sorted(unknown)}")
        year = data['year']
        if not isinstance(year, int) or isinstance(year, bool):
            raise TypeError(f"year debe ser entero, no {type(year).__name__}")
        authors = data.get('authors', [])
        if not isinstance(authors, list):
            raise TypeError("authors debe ser una lista")
        venue = data.get('venue')
        return cls(
            record_id=data['record_id'],
            title=data['title'],
            url=data.get('url'),
            year=year,
            authors=authors,
            kind=RecordKind(data['kind']),
            pages=data.get('pages'),
            venue=VenueRef.from_dict(venue) if venue is not None else None,
            publisher=data.get('publisher'),
            editors=data.get('editors'),
            isbn=data.get('isbn'),
        )


def _enum_text(value) -> str:
    return value.value if isinstance(value, Enum) else str(value)


# =============================================================================
# Validación — las violaciones son datos, no fallos
# =============================================================================

@dataclass(frozen=True, slots=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_record(candidate: CanonicalRecord) -> ValidationResult:
    """
    Verifica las invariantes del registro canónico y enumera cada violación.

    Devuelve
    --------
    ValidationResult
        .ok es True sii no hay violaciones.
    """
    violations = []

    if not isinstance(candidate.record_id, str) or not candidate.record_id:
        violations.append("empty record_id")
    if not isinstance(candidate.title, str) or not candidate.title.strip():
        violations.append("empty title")
    if not isinstance(candidate.year, int) or isinstance(candidate.year, bool):
        violations.append("year not integer")
    if any(not isinstance(a, str) for a in candidate.authors):
        violations.append("author name not text")

    kind = candidate.kind
    if not isinstance(kind, RecordKind):
        violations.append("invalid kind")
    elif kind.is_article:
        if candidate.isbn is not None:
            violations.append("article carries isbn")
        if candidate.editors is not None:
            violations.append("article carries editors")
    elif candidate.venue is not None:
        violations.append("book carries venue")

    venue = candidate.venue
    if venue is not None:
        if not isinstance(venue.venue_title, str) or not venue.venue_title.strip():
            violations.append("empty venue title")
        if not isinstance(venue.venue_type, VenueType):
            violations.append("invalid venue type")

    return ValidationResult(tuple(violations))


# =============================================================================
# Factor de escala y parámetros de término
# =============================================================================

SCALE_FACTORS = (0.125, 0.25, 0.5, 1.0)


@dataclass(frozen=True, slots=True)
class ScaleFactor:
    """
    Tamaño fraccionario del subconjunto: SF ∈ {0.125, 0.25, 0.5, 1}.

    position es la posición 1..4 en el eje de las figuras (columna NO_DOCS).
    """
    value: float

    def __post_init__(self):
        if isinstance(self.value, bool):
            raise InvalidScaleFactor(self.value)
        try:
            value = float(self.value)
        except (TypeError, ValueError):
            raise InvalidScaleFactor(self.value)
        if value not in SCALE_FACTORS:
            raise InvalidScaleFactor(self.value)
        object.__setattr__(self, 'value', value)

    @classmethod
    def parse(cls, text) -> 'ScaleFactor':
        if isinstance(text, bool):
            raise InvalidScaleFactor(text)
        try:
            return cls(float(text))
        except (TypeError, ValueError):
            raise InvalidScaleFactor(text)

    @classmethod
    def all(cls) -> tuple['ScaleFactor', ...]:
        return tuple(cls(v) for v in SCALE_FACTORS)

    @property
    def position(self) -> int:
        return SCALE_FACTORS.index(self.value) + 1

    def __str__(self) -> str:
        return f"{self.value:g}"


# Términos por defecto t1, t2, t3.
DEFAULT_TERMS = ("database", "text", "mining")


@dataclass(frozen=True, slots=True)
class TermParam:
    """Término t_i de búsqueda, con su índice i ∈ {1, 2, 3}."""
    index: int
    term: str

    def __post_init__(self):
        if self.index not in (1, 2, 3):
            raise InvalidParameterError('index', self.index, "debe ser 1, 2 o 3")
        if not isinstance(self.term, str) or not self.term:
            raise InvalidParameterError('term', self.term, "no puede ser vacío")


def parse_terms(text: Optional[str] = None) -> tuple[TermParam, ...]:
    """
    Convierte 'database,text,mining' en (t1, t2, t3).
    Sin argumento devuelve los términos por defecto.
    """
    words = DEFAULT_TERMS if not text else tuple(w.strip() for w in text.split(','))
    if len(words) != 3:
        raise InvalidParameterError('terms', text, "se requieren exactamente 3 términos")
    return tuple(TermParam(i, w) for i, w in enumerate(words, start=1))
