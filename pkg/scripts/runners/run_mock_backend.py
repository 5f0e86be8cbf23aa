# --- run_mock_backend.py ---
# Levanta el backend HTTP simulado hasta Ctrl-C.
#
#   python scripts/runners/run_mock_backend.py --port 5984

import logging
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.mock_backend import serve
from scripts.core.translate import DEFAULT_COLLECTION
from scripts.utils.cli import base_parser, guarded, setup

logger = logging.getLogger("scripts.runners.run_mock_backend")


def build_parser():
    parser = base_parser("Backend simulado que interpreta las consultas traducidas y responde con el oráculo.")
    parser.add_argument('--host', default='127.0.0.1')
    parser.add_argument('--port', type=int, default=5984)
    parser.add_argument('--collection', default=DEFAULT_COLLECTION)
    return parser


@guarded
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup(args)
    server = serve(args.host, args.port, args.collection)
    host, port = server.server_address[:2]
    logger.info("[mock] escuchando en http://%s:%d (colección %s)", host, port, args.collection)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("[mock] detenido")
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
