# --- cli.py ---
# Piezas compartidas por los runners: opciones comunes y manejo de errores.
# Códigos de salida: 0 éxito, 1 error del dominio (DodBenchError), 2 uso (argparse).

import argparse
import functools
import logging

from scripts.core.exceptions import DodBenchError
from scripts.core.model import parse_terms

from .logs import configure_logging

logger = logging.getLogger("scripts.runners")


def base_parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument('-v', '--verbose', action='store_true', help="logs en nivel DEBUG")
    return parser


def add_query_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--terms', default=None,
                        help="t1,t2,t3 (por defecto database,text,mining)")
    parser.add_argument('--case-sensitive', action='store_true',
                        help="contains() distingue mayúsculas")


def terms_from(args):
    return parse_terms(getattr(args, 'terms', None))


def guarded(main):
    """
    Envuelve main(argv) -> int: un DodBenchError se vuelve código 1 con el
    mensaje en el log. El logging lo configura setup(), no este decorador.
    """
    @functools.wraps(main)
    def wrapper(argv=None) -> int:
        try:
            return main(argv)
        except DodBenchError as exc:
            logger.error("%s: %s", type(exc).__name__, exc)
            return 1
    return wrapper


def setup(args) -> None:
    configure_logging(getattr(args, 'verbose', False))
