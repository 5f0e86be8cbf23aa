# --- logs.py ---
# Configuración única de logging para los runners.
# Los módulos de core/ sólo piden su logger con logging.getLogger(__name__);
# quién escribe, dónde y con qué nivel lo decide el punto de entrada.

import logging
import sys

import yaml

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def configure_logging(verbose: bool = False, stream=None) -> None:
    """Envía los logs del paquete a stderr (INFO, o DEBUG con verbose)."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        stream=stream or sys.stderr,
        force=True,
    )


def dump_stats(title: str, stats: dict, stream=None) -> None:
    """
    Vuelca un resumen como YAML a stderr: texto estructurado que se puede
    leer a ojo o volver a cargar con yaml.safe_load.
    """
    stream = stream or sys.stderr
    stream.write(yaml.safe_dump({title: stats}, sort_keys=False, allow_unicode=True))
    stream.flush()
