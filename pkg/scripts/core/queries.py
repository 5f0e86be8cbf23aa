# --- queries.py ---
# Modelo abstracto (independiente del backend) de las nueve consultas Q1–Q9.
#
# Selección (proyección Π1 = {title}):
#   Q1  contains(title, t_i)
#   Q2  t_i AND t_j           Q3  t_i OR t_j
#   Q4  t_i AND t_j AND t_k   Q5  t_i OR t_j OR t_k
# Agregación (γ con count(record_id) sobre el join desnormalizado Authors ⋈ Records):
#   Q6  group by author                        (Π6 = {author_name, count})
#   Q7  group by author, year                  (Π7 = {author_name, year, count})
#   Q8  Q7 restringida al filtro de Q4 (AND)   Q9  Q7 restringida al filtro de Q5 (OR)
#
# Todos los tipos son inmutables; las operaciones son puras. La forma textual
# canónica (p. ej. "Q2(i=1,j=2)") es la que aparece en la CLI, en runs.csv y
# en los nombres de los golden files.

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

from .exceptions import ArityMismatch, InvalidParameterError, QueryTextError
from .model import TermParam, parse_terms


# =============================================================================
# Tokenización y contains()
# =============================================================================

# Corridas maximales de caracteres alfanuméricos (unicode); '_' es separador.
TOKEN_PATTERN = re.compile(r"[^\W_]+")


def tokenize(title: str) -> list[str]:
    """
    Tokens en minúsculas de un título, separando en cualquier carácter no
    alfanumérico. "Text Mining: A Survey" → ["text", "mining", "a", "survey"].
    """
    return TOKEN_PATTERN.findall(title.lower())


def contains(title: str, term: str, case_sensitive: bool = False) -> bool:
    """True sii term aparece como subcadena contigua de title."""
    if not term:
        raise InvalidParameterError('term', term, "no puede ser vacío")
    if case_sensitive:
        return term in title
    return term.lower() in title.lower()


# =============================================================================
# Restricciones sobre el título
# =============================================================================

@dataclass(frozen=True, slots=True)
class TermConstraint:
    """Hoja c_i: contains(title, t_i)."""
    term: TermParam

    @property
    def index(self) -> int:
        return self.term.index

    def matches(self, title: str, case_sensitive: bool = False) -> bool:
        return contains(title, self.term.term, case_sensitive)

    def leaves(self) -> Iterator['TermConstraint']:
        yield self

    def sort_key(self) -> tuple[int, ...]:
        return (self.term.index,)


class Connective(str, Enum):
    AND = "And"
    OR = "Or"


@dataclass(frozen=True, slots=True)
class BoolExpr:
    """Nodo And/Or de aridad ≥ 2. Los operandos quedan ordenados por índice."""
    op: Connective
    operands: tuple['ConstraintExpr', ...]

    def matches(self, title: str, case_sensitive: bool = False) -> bool:
        if self.op == Connective.AND:
            return all(o.matches(title, case_sensitive) for o in self.operands)
        return any(o.matches(title, case_sensitive) for o in self.operands)

    def leaves(self) -> Iterator[TermConstraint]:
        for operand in self.operands:
            yield from operand.leaves()

    def sort_key(self) -> tuple[int, ...]:
        return tuple(leaf.index for leaf in self.leaves())


ConstraintExpr = Union[TermConstraint, BoolExpr]


def _combine(op: Connective, operands, allow_repeated: bool) -> BoolExpr:
    operands = tuple(
        TermConstraint(o) if isinstance(o, TermParam) else o for o in operands
    )
    if len(operands) < 2:
        raise InvalidParameterError('operands', len(operands), f"{op.value} requiere aridad ≥ 2")
    indices = [leaf.index for o in operands for leaf in o.leaves()]
    if not allow_repeated and len(set(indices)) != len(indices):
        raise InvalidParameterError('operands', indices, "los índices de término deben ser distintos")
    return BoolExpr(op, tuple(sorted(operands, key=lambda o: o.sort_key())))


def conjunction(*operands, allow_repeated: bool = False) -> BoolExpr:
    """And(c_i, c_j, ...). Acepta TermParam o expresiones."""
    return _combine(Connective.AND, operands, allow_repeated)


def disjunction(*operands, allow_repeated: bool = False) -> BoolExpr:
    """Or(c_i, c_j, ...)."""
    return _combine(Connective.OR, operands, allow_repeated)


# =============================================================================
# Proyección y agregación
# =============================================================================

class Projection(tuple, Enum):
    TITLE = ("title",)                                  # Π1
    AUTHOR_COUNT = ("author_name", "count")             # Π6
    AUTHOR_YEAR_COUNT = ("author_name", "year", "count")  # Π7

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(self.value)


BY_AUTHOR = ("author_name",)
BY_AUTHOR_YEAR = ("author_name", "year")


@dataclass(frozen=True, slots=True)
class AggregationSpec:
    """γ_L con L = (F, G): F fijo en count(record_id), G uno de dos conjuntos."""
    group_by: tuple[str, ...]
    functions: tuple[str, ...] = ("count(record_id)",)

    def __post_init__(self):
        object.__setattr__(self, 'group_by', tuple(self.group_by))
        if self.group_by not in (BY_AUTHOR, BY_AUTHOR_YEAR):
            raise InvalidParameterError('group_by', self.group_by,
                                        "debe ser (author_name) o (author_name, year)")
        if self.functions != ("count(record_id)",):
            raise InvalidParameterError('functions', self.functions,
                                        "sólo se admite count(record_id)")

    @property
    def by_year(self) -> bool:
        return self.group_by == BY_AUTHOR_YEAR


# =============================================================================
# Identificadores y QuerySpec
# =============================================================================

class QueryId(str, Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"
    Q5 = "Q5"
    Q6 = "Q6"
    Q7 = "Q7"
    Q8 = "Q8"
    Q9 = "Q9"

    @property
    def arity(self) -> int:
        return ARITY[self]

    @property
    def is_aggregation(self) -> bool:
        return self in (QueryId.Q6, QueryId.Q7, QueryId.Q8, QueryId.Q9)


ARITY = {
    QueryId.Q1: 1, QueryId.Q2: 2, QueryId.Q3: 2, QueryId.Q4: 3, QueryId.Q5: 3,
    QueryId.Q6: 0, QueryId.Q7: 0, QueryId.Q8: 3, QueryId.Q9: 3,
}

SELECTION_FAMILY = "selection"
AGGREGATION_FAMILY = "aggregation"
_INDEX_NAMES = ("i", "j", "k")


@dataclass(frozen=True, slots=True, kw_only=True)
class QuerySpec:
    """
    Una instancia concreta de Q1..Q9.

    indices        : índices de término en orden creciente (i, j, k).
    filter         : restricción sobre el título (None en Q6/Q7).
    projection     : Π1, Π6 o Π7.
    aggregation    : None en Q1–Q5.
    case_sensitive : contains() distingue mayúsculas (por defecto no).
    """
    id: QueryId
    indices: tuple[int, ...] = ()
    filter: Optional[ConstraintExpr] = None
    projection: Projection
    aggregation: Optional[AggregationSpec] = None
    case_sensitive: bool = False

    def __post_init__(self):
        qid = self.id
        if qid.is_aggregation:
            if self.aggregation is None:
                raise InvalidParameterError('aggregation', None, f"{qid.value} agrega")
            expected = Projection.AUTHOR_COUNT if qid == QueryId.Q6 else Projection.AUTHOR_YEAR_COUNT
            if self.projection != expected:
                raise InvalidParameterError('projection', self.projection, f"{qid.value} usa {expected.name}")
        else:
            if self.aggregation is not None or self.projection != Projection.TITLE:
                raise InvalidParameterError('projection', self.projection, f"{qid.value} proyecta title")
        if (self.filter is None) != (qid.arity == 0):
            raise InvalidParameterError('filter', self.filter, f"filtro incoherente con {qid.value}")

    @property
    def is_aggregation(self) -> bool:
        return self.aggregation is not None

    @property
    def family(self) -> str:
        return AGGREGATION_FAMILY if self.is_aggregation else SELECTION_FAMILY

    @property
    def terms(self) -> tuple[TermParam, ...]:
        return tuple(leaf.term for leaf in self.filter.leaves()) if self.filter else ()

    @property
    def text(self) -> str:
        """Forma canónica: Q6, Q1(i=2), Q2(i=1,j=3), Q8(i=1,j=2,k=3)."""
        if not self.indices:
            return self.id.value
        args = ",".join(f"{n}={v}" for n, v in zip(_INDEX_NAMES, self.indices))
        return f"{self.id.value}({args})"

    @property
    def label(self) -> str:
        """
        Etiqueta corta para archivos y columnas: Q1_2, Q2_13, Q4, Q6.
        Las consultas de tres términos sobre (1, 2, 3) no llevan sufijo.
        """
        if not self.indices or self.indices == (1, 2, 3):
            return self.id.value
        return f"{self.id.value}_{''.join(str(i) for i in self.indices)}"

    def __str__(self) -> str:
        return self.text


def build_query(
    query_id,
    terms: Sequence[TermParam] = (),
    case_sensitive: bool = False,
    allow_repeated: bool = False,
) -> QuerySpec:
    """
    Construye la QuerySpec de Q1..Q9 a partir de sus términos.

    Parámetros
    ----------
    query_id : QueryId o str ("Q2")
    terms : lista de TermParam, tantos como la aridad de la consulta.
    allow_repeated : admite Q2(i,i) y similares (sólo para pruebas).

    Lanza
    -----
    ArityMismatch si len(terms) no coincide con la aridad.
    """
    qid = QueryId(query_id)
    terms = tuple(terms)
    if len(terms) != qid.arity:
        raise ArityMismatch(qid.value, qid.arity, len(terms))

    filt = None
    if qid == QueryId.Q1:
        filt = TermConstraint(terms[0])
    elif qid in (QueryId.Q2, QueryId.Q4, QueryId.Q8):
        filt = conjunction(*terms, allow_repeated=allow_repeated)
    elif qid in (QueryId.Q3, QueryId.Q5, QueryId.Q9):
        filt = disjunction(*terms, allow_repeated=allow_repeated)

    if qid == QueryId.Q6:
        projection, aggregation = Projection.AUTHOR_COUNT, AggregationSpec(BY_AUTHOR)
    elif qid.is_aggregation:
        projection, aggregation = Projection.AUTHOR_YEAR_COUNT, AggregationSpec(BY_AUTHOR_YEAR)
    else:
        projection, aggregation = Projection.TITLE, None

    return QuerySpec(
        id=qid,
        indices=tuple(sorted(t.index for t in terms)),
        filter=filt,
        projection=projection,
        aggregation=aggregation,
        case_sensitive=case_sensitive,
    )


# =============================================================================
# Forma textual y catálogo de instancias
# =============================================================================

_QUERY_TEXT = re.compile(r"^\s*(Q[1-9])\s*(?:\(([^)]*)\))?\s*$")
_QUERY_TOKEN = re.compile(r"Q[1-9](?:\([^)]*\))?")
_QUERY_RANGE = re.compile(r"^\s*Q([1-9])\s*\.\.\s*Q([1-9])\s*$")


def _term_table(terms) -> dict[int, TermParam]:
    if terms is None:
        terms = parse_terms()
    return {t.index: t for t in terms}


def parse_query_text(text: str, terms: Optional[Sequence[TermParam]] = None,
                     case_sensitive: bool = False) -> QuerySpec:
    """
    Inverso de QuerySpec.text. Los índices se resuelven contra `terms`
    (por defecto database, text, mining).

    Lanza
    -----
    QueryTextError si el texto no tiene la forma canónica;
    ArityMismatch si la cantidad de índices no es la aridad.
    """
    match = _QUERY_TEXT.match(text or "")
    if not match:
        raise QueryTextError(text, "se esperaba Qn o Qn(i=..,j=..,k=..)")
    qid = QueryId(match.group(1))
    table = _term_table(terms)

    selected = []
    args = match.group(2)
    if args is not None and args.strip():
        for position, part in enumerate(args.split(',')):
            name, _, value = part.partition('=')
            name = name.strip()
            if position >= len(_INDEX_NAMES) or name != _INDEX_NAMES[position]:
                raise QueryTextError(text, f"argumento inesperado '{part.strip()}'")
            try:
                index = int(value)
            except ValueError:
                raise QueryTextError(text, f"índice no entero '{value.strip()}'")
            if index not in table:
                raise QueryTextError(text, f"no hay término t{index}")
            selected.append(table[index])
    return build_query(qid, selected, case_sensitive=case_sensitive)


def catalogue_instances(terms: Optional[Sequence[TermParam]] = None,
                    case_sensitive: bool = False) -> list[QuerySpec]:
    """
    Las quince instancias medidas, en el orden de las tablas de selectividad:
    Q1¹ Q1² Q1³ Q2¹² Q2¹³ Q2²³ Q3¹² Q3¹³ Q3²³ Q4 Q5 | Q6 Q7 Q8 Q9.
    """
    table = _term_table(terms)
    t = [table[1], table[2], table[3]]
    pairs = [(0, 1), (0, 2), (1, 2)]
    specs = [build_query(QueryId.Q1, [x], case_sensitive) for x in t]
    specs += [build_query(QueryId.Q2, [t[a], t[b]], case_sensitive) for a, b in pairs]
    specs += [build_query(QueryId.Q3, [t[a], t[b]], case_sensitive) for a, b in pairs]
    specs += [build_query(q, t, case_sensitive) for q in (QueryId.Q4, QueryId.Q5)]
    specs += [build_query(q, [], case_sensitive) for q in (QueryId.Q6, QueryId.Q7)]
    specs += [build_query(q, t, case_sensitive) for q in (QueryId.Q8, QueryId.Q9)]
    return specs


def parse_query_list(text: str, terms: Optional[Sequence[TermParam]] = None,
                     case_sensitive: bool = False) -> list[QuerySpec]:
    """
    Lista de consultas para los runners:
      "all"                 → las quince instancias del catálogo;
      "Q1..Q9" / "Q6..Q9"   → instancias del catálogo en ese rango de ids;
      "Q2(i=1,j=2),Q6,Q1"   → lista explícita; un id sin índices y con
                               aridad > 0 se expande a sus instancias.
    """
    catalogue = catalogue_instances(terms, case_sensitive)
    if text is None or text.strip().lower() == 'all':
        return catalogue

    span = _QUERY_RANGE.match(text)
    if span:
        low, high = int(span.group(1)), int(span.group(2))
        if low > high:
            raise QueryTextError(text, "rango vacío")
        return [q for q in catalogue if low <= int(q.id.value[1:]) <= high]

    tokens = _QUERY_TOKEN.findall(text)
    leftover = _QUERY_TOKEN.sub("", text).replace(",", "").strip()
    if not tokens or leftover:
        raise QueryTextError(text, "lista de consultas ilegible")

    specs = []
    for token in tokens:
        qid = QueryId(token[:2])
        if '(' not in token and qid.arity > 0:
            specs.extend(q for q in catalogue if q.id == qid)
        else:
            specs.append(parse_query_text(token, terms, case_sensitive))
    return specs
