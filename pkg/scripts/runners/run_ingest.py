# --- run_ingest.py ---
# XML estilo DBLP → archivo canónico (un registro JSON por línea).
#
#   python scripts/runners/run_ingest.py --in dblp.xml --out data/dblp.jsonl
#
# El resumen (aceptados, descartados por motivo, bytes) se vuelca como YAML
# a stderr. Un XML mal formado termina con código 1.

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.ingest import MAX_ELEMENT_BYTES, ingest_stream
from scripts.utils.canonical_io import CanonicalWriter
from scripts.utils.cli import base_parser, guarded, setup
from scripts.utils.logs import dump_stats


def build_parser():
    parser = base_parser("Ingesta en streaming de XML DBLP a formato canónico.")
    parser.add_argument('--in', dest='source', required=True, help="archivo XML (dblp.xml)")
    parser.add_argument('--out', required=True, help="archivo canónico de salida")
    parser.add_argument('--max-element-bytes', type=int, default=MAX_ELEMENT_BYTES,
                        help="tope por publicación (bytes)")
    parser.add_argument('--progress', action='store_true', help="barra de progreso")
    return parser


@guarded
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup(args)
    with CanonicalWriter(args.out) as writer:
        stats = ingest_stream(args.source, writer, max_element_bytes=args.max_element_bytes,
                              progress=args.progress)
    dump_stats('ingest', stats.as_dict())
    return 0


if __name__ == "__main__":
    sys.exit(main())
