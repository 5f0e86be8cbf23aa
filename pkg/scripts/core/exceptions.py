# --- exceptions.py ---
# Jerarquía de excepciones personalizadas para el benchmark de bases de datos
# documentales (dodbench).
#
# Permiten distinguir errores del DOMINIO (XML corrupto, aridad de consultas,
# backends caídos) de errores genéricos de Python, de modo que cada etapa
# del pipeline decide qué es fatal y qué se registra como dato.
#
#   Ejemplo de uso:
#       try:
#           stats = ingest_stream(fh, sink)
#       except MalformedXml as exc:
#           # abortar con el offset del byte donde falló el parser
#           sys.exit(1)


class DodBenchError(Exception):
    """Clase base para todos los errores del proyecto."""


# --- Errores de parámetros / configuración ---

class InvalidParameterError(DodBenchError):
    """
    Un parámetro tiene un valor fuera del rango válido.
    Por ejemplo: runs < 0, timeout <= 0, max_element_bytes <= 0.
    """
    def __init__(self, param_name: str, value, reason: str = ""):
        self.param_name = param_name
        self.value = value
        super().__init__(
            f"Parámetro inválido '{param_name}' = {value!r}. "
            f"{reason}"
        )


class InvalidScaleFactor(InvalidParameterError):
    """El factor de escala no es uno de {0.125, 0.25, 0.5, 1.0}."""
    def __init__(self, value):
        super().__init__(
            'sf', value, "debe ser uno de 0.125, 0.25, 0.5 o 1.0"
        )


class ConfigError(DodBenchError):
    """El archivo de configuración de backends es inválido o incompleto."""
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Configuración inválida: {reason}")


# --- Errores de ingesta / datos ---

class MalformedXml(DodBenchError):
    """
    El flujo XML no está bien formado. Aborta la ingesta completa:
    no hay recuperación de XML corrupto.

    byte_offset es el número de bytes consumidos del flujo cuando el parser
    detectó el error (granularidad de bloque de lectura).
    """
    def __init__(self, byte_offset: int, line: int = None, column: int = None,
                 detail: str = ""):
        self.byte_offset = byte_offset
        self.line = line
        self.column = column
        self.detail = detail
        where = f"byte {byte_offset}"
        if line is not None:
            where += f" (línea {line}, columna {column})"
        super().__init__(f"XML mal formado en {where}: {detail}")


class OversizedElement(DodBenchError):
    """
    Un elemento de publicación supera el tope configurado.
    Un registro DBLP real ocupa pocos KiB; superar el tope indica entrada corrupta.
    """
    def __init__(self, size: int, cap: int, key: str = None):
        self.size = size
        self.cap = cap
        self.key = key
        key_info = f" (key={key})" if key else ""
        super().__init__(
            f"Elemento de publicación de {size} bytes{key_info} "
            f"supera el tope de {cap} bytes. ¿Entrada corrupta?"
        )


class CorruptRecord(DodBenchError):
    """Una línea del archivo canónico no es un registro válido."""
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"Registro corrupto en la línea {line_number}: {reason}")


class DuplicateRecordId(CorruptRecord):
    """record_id repetido dentro de un mismo Dataset."""
    def __init__(self, record_id: str, line_number: int):
        self.record_id = record_id
        super().__init__(line_number, f"record_id duplicado '{record_id}'")


class IoFailure(DodBenchError):
    """Fallo de escritura/lectura al emitir archivos de datos o reportes."""
    def __init__(self, path, detail: str = ""):
        self.path = str(path)
        self.detail = detail
        super().__init__(f"Fallo de E/S en {self.path}: {detail}")


class DataFileNotFoundError(DodBenchError):
    """
    No se encontró un archivo de entrada esperado.
    hint indica qué etapa produce el archivo.
    """
    def __init__(self, filepath, hint: str = ""):
        self.filepath = str(filepath)
        self.hint = hint
        super().__init__(
            f"Archivo de datos no encontrado: {self.filepath}. "
            f"{hint}"
        )


# --- Errores del modelo de consultas ---

class ArityMismatch(DodBenchError):
    """La cantidad de términos no coincide con la aridad de la consulta."""
    def __init__(self, query_id: str, expected: int, received: int):
        self.query_id = query_id
        self.expected = expected
        self.received = received
        super().__init__(
            f"{query_id} requiere {expected} término(s), se recibieron {received}."
        )


class QueryTextError(DodBenchError):
    """La forma textual canónica de una consulta no se pudo interpretar."""
    def __init__(self, text: str, reason: str):
        self.text = text
        self.reason = reason
        super().__init__(f"Consulta ilegible '{text}': {reason}")


class EmptyPopulation(DodBenchError):
    """
    N = 0 al calcular la selectividad S = 1 - n/N.
    Ocurre con datasets vacíos (o sin pares autor-registro para agregaciones).
    """
    def __init__(self, query: str):
        self.query = query
        super().__init__(
            f"Población vacía para {query}: la selectividad no está definida."
        )


class UnsupportedCombination(DodBenchError):
    """
    Consulta sin traducción para el dialecto pedido.
    Reservada: hoy los cinco dialectos cubren las nueve consultas.
    """
    def __init__(self, query: str, dialect: str):
        self.query = query
        self.dialect = dialect
        super().__init__(f"{query} no tiene traducción para el dialecto {dialect}.")


# --- Errores de backends / ejecución ---

class BackendUnreachable(DodBenchError):
    """El ping al backend falló antes de iniciar la medición."""
    def __init__(self, backend: str, detail: str = ""):
        self.backend = backend
        self.detail = detail
        super().__init__(f"Backend '{backend}' inalcanzable: {detail}")


class QueryTimeout(DodBenchError):
    """
    La consulta superó el timeout configurado. Se registra por ejecución
    y no aborta la suite.
    """
    def __init__(self, backend: str, timeout: float):
        self.backend = backend
        self.timeout = timeout
        super().__init__(
            f"Backend '{backend}': la consulta superó el timeout de {timeout:g} s."
        )


class AdapterFailure(DodBenchError):
    """El adaptador recibió un error del backend (texto del backend en detail)."""
    def __init__(self, backend: str, detail: str = ""):
        self.backend = backend
        self.detail = detail
        super().__init__(f"Backend '{backend}' falló: {detail}")


class CountMismatch(DodBenchError):
    """Tras la carga, el conteo de la colección no coincide con el dataset."""
    def __init__(self, backend: str, expected: int, actual: int):
        self.backend = backend
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Backend '{backend}': se esperaban {expected} documentos, "
            f"la colección tiene {actual}."
        )
