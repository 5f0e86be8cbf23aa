# --- translate.py ---
# Compilación de una QuerySpec a texto ejecutable en cada dialecto.
#
# Estrategias por sistema:
#   XQuery31        (BaseX, eXist-db)  FLWOR con group by / order by.
#   XQuery10        (Sedna)            FOR/WHERE/LET/ORDER BY con distinct-values.
#   MongoPipeline   (MongoDB)          find() para filtros; aggregate() con $unwind.
#   CouchMangoView  (CouchDB)          Mango (_find) para filtros; vista map/reduce
#                                      (filtro + aplanado en map, _count en reduce).
#   N1QL            (Couchbase)        SELECT ... UNNEST ... GROUP BY.
#
# Todos los filtros combinan los términos en UNA expresión (conjunción para
# Q2/Q4/Q8, disyunción para Q3/Q5/Q9). Las agregaciones se ordenan por clave
# de grupo. translate() es puro: mismo texto byte a byte en cada ejecución.
#
# Jerarquía:
#   Translator (ABC)
#   ├── XQuery31Translator
#   ├── XQuery10Translator
#   ├── MongoTranslator
#   ├── CouchTranslator
#   └── N1qlTranslator
#   + translator_for(dialect) / translate(q, dialect) como fábrica.

import hashlib
import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

from .exceptions import UnsupportedCombination
from .queries import BoolExpr, Connective, QuerySpec, TermConstraint

DEFAULT_COLLECTION = "dblp"


class Dialect(str, Enum):
    XQUERY31 = "XQuery31"
    XQUERY10 = "XQuery10"
    MONGO_PIPELINE = "MongoPipeline"
    COUCH_MANGO_VIEW = "CouchMangoView"
    N1QL = "N1QL"

    @property
    def extension(self) -> str:
        return EXTENSIONS[self]

    @property
    def data_format(self) -> str:
        """Formato de carga que ingiere el backend: xml o json."""
        return "xml" if self in (Dialect.XQUERY31, Dialect.XQUERY10) else "json"


EXTENSIONS = {
    Dialect.XQUERY31: ".xq",
    Dialect.XQUERY10: ".xq",
    Dialect.MONGO_PIPELINE: ".js",
    Dialect.COUCH_MANGO_VIEW: ".http",
    Dialect.N1QL: ".n1ql",
}


@dataclass(frozen=True, slots=True)
class TranslatedQuery:
    """
    main_text   : el texto que se cronometra.
    setup_texts : artefactos a instalar antes de medir (vistas CouchDB).
    """
    dialect: Dialect
    query: str
    main_text: str
    setup_texts: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.main_text:
            raise ValueError("main_text no puede ser vacío")
        object.__setattr__(self, 'setup_texts', tuple(self.setup_texts))


def _needle(leaf: TermConstraint, q: QuerySpec) -> str:
    return leaf.term.term if q.case_sensitive else leaf.term.term.lower()


# =============================================================================
# Clase base abstracta
# =============================================================================

class Translator(ABC):
    """Un traductor por dialecto. Subclases implementan selection/aggregation."""

    dialect: Dialect

    def __init__(self, collection: str = DEFAULT_COLLECTION):
        self.collection = collection

    def translate(self, q: QuerySpec) -> TranslatedQuery:
        if q.is_aggregation:
            main, setup = self.aggregation(q)
        else:
            main, setup = self.selection(q), ()
        return TranslatedQuery(self.dialect, q.text, main, tuple(setup))

    @abstractmethod
    def selection(self, q: QuerySpec) -> str:
        """Texto de Q1–Q5."""

    @abstractmethod
    def aggregation(self, q: QuerySpec) -> tuple[str, tuple[str, ...]]:
        """(main_text, setup_texts) de Q6–Q9."""

    def explain(self, q: QuerySpec) -> list[str]:
        notes = [f"{q.text} → {self.dialect.value}"]
        if q.filter is not None and isinstance(q.filter, BoolExpr):
            word = "conjunción" if q.filter.op == Connective.AND else "disyunción"
            notes.append(f"constraint folding: los {len(q.terms)} términos se pliegan en "
                         f"una sola expresión ({word})")
        elif q.filter is not None:
            notes.append("una sola restricción contains() sobre el título")
        notes.append("contains() " + ("distingue mayúsculas" if q.case_sensitive
                                      else "sin distinguir mayúsculas"))
        notes.extend(self.strategy_notes(q))
        return notes

    @abstractmethod
    def strategy_notes(self, q: QuerySpec) -> list[str]:
        ...


# =============================================================================
# XQuery 3.1 (BaseX, eXist-db)
# =============================================================================

def xquery_string(text: str) -> str:
    """Literal de cadena XQuery: comillas dobles duplicadas, & como entidad."""
    return '"' + text.replace('&', '&amp;').replace('"', '""') + '"'


class XQuery31Translator(Translator):
    dialect = Dialect.XQUERY31
    version = "3.1"

    def source(self) -> str:
        return f"collection({xquery_string(self.collection)})/dblp/*"

    def condition(self, expr, q: QuerySpec, subject: str = "$r/title") -> str:
        if isinstance(expr, BoolExpr):
            joiner = " and " if expr.op == Connective.AND else " or "
            parts = []
            for operand in expr.operands:
                text = self.condition(operand, q, subject)
                parts.append(f"({text})" if isinstance(operand, BoolExpr) else text)
            return joiner.join(parts)
        target = subject if q.case_sensitive else f"lower-case({subject})"
        return f"contains({target}, {xquery_string(_needle(expr, q))})"

    def header(self) -> str:
        return f'xquery version "{self.version}";\n'

    def selection(self, q: QuerySpec) -> str:
        return (
            self.header()
            + f"for $r in {self.source()}\n"
            + f"where {self.condition(q.filter, q)}\n"
            + "return <row>{string($r/title)}</row>\n"
        )

    def aggregation(self, q: QuerySpec):
        lines = [f"for $r in {self.source()}"]
        if q.filter is not None:
            lines.append(f"where {self.condition(q.filter, q)}")
        lines.append("for $a in $r/author")
        lines.append("let $name := string($a)")
        if q.aggregation.by_year:
            lines += [
                "let $year := xs:integer($r/year)",
                "group by $name, $year",
                "order by $name, $year",
                "return <row><author>{$name}</author><year>{$year}</year>"
                "<count>{count($r)}</count></row>",
            ]
        else:
            lines += [
                "group by $name",
                "order by $name",
                "return <row><author>{$name}</author><count>{count($r)}</count></row>",
            ]
        return self.header() + "\n".join(lines) + "\n", ()

    def strategy_notes(self, q):
        if not q.is_aggregation:
            return ["FLWOR con where sobre el título; sin agrupación"]
        return ["for anidado sobre $r/author aplana los autores",
                "group by / order by de XQuery 3.x; count($r) cuenta pares autor-registro"]


# =============================================================================
# XQuery 1.0 (Sedna)
# =============================================================================

class XQuery10Translator(XQuery31Translator):
    dialect = Dialect.XQUERY10
    version = "1.0"

    def aggregation(self, q: QuerySpec):
        if q.filter is None:
            records = f"let $records := {self.source()}"
        else:
            records = (f"let $records := (for $r in {self.source()} "
                       f"where {self.condition(q.filter, q)} return $r)")
        if q.aggregation.by_year:
            body = [
                records,
                "for $name in distinct-values($records/author)",
                "for $year in distinct-values($records[author = $name]/year)",
                "let $count := count($records[year = $year]/author[. = $name])",
                "order by $name, xs:integer($year)",
                "return <row><author>{$name}</author><year>{$year}</year>"
                "<count>{$count}</count></row>",
            ]
        else:
            body = [
                records,
                "for $name in distinct-values($records/author)",
                "let $count := count($records/author[. = $name])",
                "order by $name",
                "return <row><author>{$name}</author><count>{$count}</count></row>",
            ]
        return self.header() + "\n".join(body) + "\n", ()

    def strategy_notes(self, q):
        if not q.is_aggregation:
            return ["FLWOR de XQuery 1.0; sin agrupación necesaria"]
        return ["sin group by: distinct-values() enumera los grupos",
                "FOR/WHERE/LET/ORDER BY; el conteo recorre los nodos author de cada grupo"]


# =============================================================================
# MongoDB
# =============================================================================

_REGEX_SPECIAL = re.compile(r"([.^$*+?()\[\]{}|\\/])")


def regex_literal(text: str) -> str:
    """Escapa metacaracteres de expresión regular (PCRE / JavaScript)."""
    return _REGEX_SPECIAL.sub(r"\\\1", text)


def _json(value) -> str:
    return json.dumps(value, ensure_ascii=False)


class MongoTranslator(Translator):
    dialect = Dialect.MONGO_PIPELINE

    def match(self, expr, q: QuerySpec) -> dict:
        if isinstance(expr, BoolExpr):
            key = "$and" if expr.op == Connective.AND else "$or"
            return {key: [self.match(o, q) for o in expr.operands]}
        leaf = {"$regex": regex_literal(expr.term.term)}
        if not q.case_sensitive:
            leaf["$options"] = "i"
        return {"title": leaf}

    def selection(self, q: QuerySpec) -> str:
        return (f"db.{self.collection}.find({_json(self.match(q.filter, q))}, "
                f'{{"_id": 0, "title": 1}}).toArray()\n')

    def aggregation(self, q: QuerySpec):
        stages = []
        if q.filter is not None:
            stages.append({"$match": self.match(q.filter, q)})
        stages.append({"$unwind": "$authors"})
        if q.aggregation.by_year:
            group_id = {"author": "$authors", "year": "$year"}
            order = {"_id.author": 1, "_id.year": 1}
        else:
            group_id = {"author": "$authors"}
            order = {"_id.author": 1}
        stages.append({"$group": {"_id": group_id, "count": {"$sum": 1}}})
        stages.append({"$sort": order})
        body = ",\n".join(f"  {_json(stage)}" for stage in stages)
        text = (f"db.{self.collection}.aggregate([\n{body}\n], "
                f'{{"allowDiskUse": true}}).toArray()\n')
        return text, ()

    def strategy_notes(self, q):
        if not q.is_aggregation:
            return ["find() con $regex sobre title; proyección sólo de title"]
        return ["$unwind sobre authors aplana el arreglo de autores",
                "$group con {$sum: 1} cuenta pares; $sort por clave de grupo"]


# =============================================================================
# CouchDB
# =============================================================================

FIND_LIMIT = 100000000
VIEW_NAME = "q"
DESIGN_PREFIX = "dodbench_"


def _js_condition(expr, q: QuerySpec) -> str:
    if isinstance(expr, BoolExpr):
        joiner = " && " if expr.op == Connective.AND else " || "
        parts = []
        for operand in expr.operands:
            text = _js_condition(operand, q)
            parts.append(f"({text})" if isinstance(operand, BoolExpr) else text)
        return joiner.join(parts)
    return f"t.indexOf({_json(_needle(expr, q))}) !== -1"


class CouchTranslator(Translator):
    dialect = Dialect.COUCH_MANGO_VIEW

    def selector(self, expr, q: QuerySpec) -> dict:
        if isinstance(expr, BoolExpr):
            key = "$and" if expr.op == Connective.AND else "$or"
            return {key: [self.selector(o, q) for o in expr.operands]}
        prefix = "" if q.case_sensitive else "(?i)"
        return {"title": {"$regex": prefix + regex_literal(expr.term.term)}}

    def selection(self, q: QuerySpec) -> str:
        body = {"selector": self.selector(q.filter, q), "fields": ["title"], "limit": FIND_LIMIT}
        return (f"POST /{self.collection}/_find\n"
                "Content-Type: application/json\n\n"
                f"{_json(body)}\n")

    def map_function(self, q: QuerySpec) -> str:
        title = "(doc.title || \"\")" if q.case_sensitive else "(doc.title || \"\").toLowerCase()"
        key = "[doc.authors[i], doc.year]" if q.aggregation.by_year else "[doc.authors[i]]"
        parts = ["function (doc) {", "if (!doc.authors) return;"]
        if q.filter is not None:
            parts.append(f"var t = {title};")
            parts.append(f"if (!({_js_condition(q.filter, q)})) return;")
        parts.append(f"for (var i = 0; i < doc.authors.length; i++) {{ emit({key}, 1); }}")
        parts.append("}")
        return " ".join(parts)

    def design_name(self, q: QuerySpec) -> str:
        """Nombre por contenido: reinstalar la misma vista es idempotente."""
        digest = hashlib.sha1(self.map_function(q).encode('utf-8')).hexdigest()
        return DESIGN_PREFIX + digest[:10]

    def aggregation(self, q: QuerySpec):
        design = self.design_name(q)
        document = {
            "language": "javascript",
            "views": {VIEW_NAME: {"map": self.map_function(q), "reduce": "_count"}},
        }
        setup = (f"PUT /{self.collection}/_design/{design}\n"
                 "Content-Type: application/json\n\n"
                 f"{_json(document)}\n")
        main = f"GET /{self.collection}/_design/{design}/_view/{VIEW_NAME}?group=true\n"
        return main, (setup,)

    def strategy_notes(self, q):
        if not q.is_aggregation:
            return ["Mango (_find) con $regex sobre title"]
        return ["map-side filtering: el map filtra el título y emite una fila por autor",
                "reduce-side count: _count con group=true sobre la clave",
                "la vista se instala antes de medir (setup_texts); el orden sigue la "
                "colación de claves de CouchDB"]


# =============================================================================
# Couchbase N1QL
# =============================================================================

class N1qlTranslator(Translator):
    dialect = Dialect.N1QL

    def condition(self, expr, q: QuerySpec) -> str:
        if isinstance(expr, BoolExpr):
            joiner = " AND " if expr.op == Connective.AND else " OR "
            parts = []
            for operand in expr.operands:
                text = self.condition(operand, q)
                parts.append(f"({text})" if isinstance(operand, BoolExpr) else text)
            return joiner.join(parts)
        target = "d.title" if q.case_sensitive else "LOWER(d.title)"
        return f"CONTAINS({target}, {_json(_needle(expr, q))})"

    def keyspace(self) -> str:
        return f"`{self.collection}` AS d"

    def selection(self, q: QuerySpec) -> str:
        return (
            "SELECT d.title\n"
            f"FROM {self.keyspace()}\n"
            f"WHERE {self.condition(q.filter, q)}\n"
        )

    def aggregation(self, q: QuerySpec):
        if q.aggregation.by_year:
            select = "SELECT a AS author, d.year AS year, COUNT(META(d).id) AS `count`"
            keys = "a, d.year"
        else:
            select = "SELECT a AS author, COUNT(META(d).id) AS `count`"
            keys = "a"
        lines = [select, f"FROM {self.keyspace()}", "UNNEST d.authors AS a"]
        if q.filter is not None:
            lines.append(f"WHERE {self.condition(q.filter, q)}")
        lines += [f"GROUP BY {keys}", f"ORDER BY {keys}"]
        return "\n".join(lines) + "\n", ()

    def strategy_notes(self, q):
        if not q.is_aggregation:
            return ["SELECT con CONTAINS() sobre el título"]
        return ["UNNEST aplana d.authors", "GROUP BY / ORDER BY sobre la clave; COUNT por documento"]


# =============================================================================
# Fábrica
# =============================================================================

TRANSLATORS = {
    Dialect.XQUERY31: XQuery31Translator,
    Dialect.XQUERY10: XQuery10Translator,
    Dialect.MONGO_PIPELINE: MongoTranslator,
    Dialect.COUCH_MANGO_VIEW: CouchTranslator,
    Dialect.N1QL: N1qlTranslator,
}


def translator_for(dialect, collection: str = DEFAULT_COLLECTION) -> Translator:
    """
    Crea el traductor del dialecto pedido.

    Lanza
    -----
    UnsupportedCombination si el dialecto no está registrado.
    """
    try:
        d = Dialect(dialect)
    except ValueError:
        raise UnsupportedCombination("*", str(dialect))
    return TRANSLATORS[d](collection)


def translate(q: QuerySpec, dialect, collection: str = DEFAULT_COLLECTION) -> TranslatedQuery:
    """Compila q al dialecto; las nueve consultas tienen traducción en los cinco."""
    return translator_for(dialect, collection).translate(q)


def explain(q: QuerySpec, dialect, collection: str = DEFAULT_COLLECTION) -> list[str]:
    """Notas legibles sobre la estrategia aplicada."""
    return translator_for(dialect, collection).explain(q)


def output_names(q: QuerySpec, tq: TranslatedQuery) -> list[str]:
    """Nombres de archivo: <label><ext> y <label>.setup-<n><ext>."""
    ext = tq.dialect.extension
    names = [f"{q.label}{ext}"]
    names += [f"{q.label}.setup-{n}{ext}" for n in range(1, len(tq.setup_texts) + 1)]
    return names
