# --- decorators.py ---
# Decoradores reutilizables del benchmark.
#
#   @timer                  duración de etapas largas (emisión, carga del oráculo)
#   @log_stage(...)         inicio / fin / falla de una etapa con sus parámetros
#   @validate_parameters    reglas (nombre, condición, mensaje) sobre argumentos
#
# Todos registran con `logging` (no print): los runners deciden el nivel y
# el destino (stderr) en scripts/utils/logs.py.

import functools
import inspect
import logging
import time

from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


def format_elapsed(elapsed: float) -> str:
    """Formatea segundos según magnitud: ms, s o min."""
    if elapsed < 1.0:
        return f"{elapsed * 1000:.1f} ms"
    elif elapsed < 60.0:
        return f"{elapsed:.2f} s"
    return f"{elapsed / 60:.1f} min"


# =============================================================================
# @timer — mide y reporta el tiempo de ejecución de cualquier función
# =============================================================================

def timer(func):
    """
    Decorador que mide el tiempo de ejecución de una función y lo registra
    en nivel INFO.

    Salida de ejemplo:
        [timer] emit_xml() → 4.32 s

    No se usa sobre operaciones medidas por el benchmark: esas miden su
    propio intervalo en bench.execute().
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start
        logger.info("[timer] %s() → %s", func.__name__, format_elapsed(elapsed))
        return result
    return wrapper


# =============================================================================
# @log_stage — registra parámetros de entrada y estado de salida
# =============================================================================

def log_stage(*param_names):
    """
    Decorador de fábrica para etapas del pipeline (ingesta, carga, suite).
    Registra los parámetros indicados al inicio y el resultado o la excepción
    al final. Los valores se buscan primero en los kwargs y luego como
    atributos del primer argumento (self o un objeto de configuración).

    Uso:
        @log_stage('sf', 'seed')
        def subset(records, sf, seed=0):
            ...
    """
    def decorator(func):
        sig = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            bound = sig.bind_partial(*args, **kwargs).arguments
            first = next(iter(bound.values()), None)
            shown = []
            for name in param_names:
                if name in bound:
                    shown.append(f"{name}={bound[name]}")
                elif first is not None and hasattr(first, name):
                    shown.append(f"{name}={getattr(first, name)}")
            logger.info("[stage] Iniciando %s() | %s", func.__name__, ", ".join(shown))
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                logger.error("[stage] %s() falló → %s: %s",
                             func.__name__, type(exc).__name__, exc)
                raise
            logger.info("[stage] %s() finalizado", func.__name__)
            return result
        return wrapper
    return decorator


# =============================================================================
# @validate_parameters — valida rangos de parámetros de funciones o métodos
# =============================================================================

def validate_parameters(*rules):
    """
    Decorador de fábrica que valida parámetros por nombre. Cada regla es una
    tupla (nombre, condición, mensaje). Funciona sobre funciones libres y
    métodos (self se enlaza como cualquier otro argumento).

    Uso:
        @validate_parameters(
            ('runs',    lambda v: v >= 0, "debe ser un entero no negativo"),
            ('timeout', lambda v: v > 0,  "debe ser positivo"),
        )
        def execute(cfg, tq, runs=10, timeout=600.0):
            ...
    """
    def decorator(func):
        sig = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            bound = sig.bind_partial(*args, **kwargs).arguments
            for param_name, condition, reason in rules:
                if param_name in bound:
                    value = bound[param_name]
                    if not condition(value):
                        raise InvalidParameterError(param_name, value, reason)
            return func(*args, **kwargs)
        return wrapper
    return decorator
