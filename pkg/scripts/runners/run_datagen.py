# --- run_datagen.py ---
# Subconjuntos por factor de escala + emisión XML / JSON.
#
#   python scripts/runners/run_datagen.py --in data/dblp.jsonl --sf all --out data/
#
# Para cada SF escribe dblp_sf<v>.jsonl (canónico), dblp_sf<v>.xml y
# dblp_sf<v>.json (o directorios xml_sf<v>/ json_sf<v>/ con --shards > 1).

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.datagen import DEFAULT_SEED, generate
from scripts.core.model import ScaleFactor
from scripts.utils.cli import base_parser, guarded, setup
from scripts.utils.logs import dump_stats

FORMATS = {'xml': ('xml',), 'json': ('json',), 'both': ('xml', 'json')}


def build_parser():
    parser = base_parser("Genera los subconjuntos SF y sus emisiones XML/JSON.")
    parser.add_argument('--in', dest='source', required=True, help="archivo canónico completo")
    parser.add_argument('--sf', default='all', help="0.125, 0.25, 0.5, 1 o all")
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    parser.add_argument('--out', required=True, help="directorio de salida")
    parser.add_argument('--format', choices=sorted(FORMATS), default='both')
    parser.add_argument('--shards', type=int, default=1)
    return parser


def scale_factors(text: str) -> tuple[ScaleFactor, ...]:
    if text.strip().lower() == 'all':
        return ScaleFactor.all()
    return tuple(ScaleFactor.parse(part) for part in text.split(','))


@guarded
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup(args)
    formats = FORMATS[args.format]
    summary = {}
    for sf in scale_factors(args.sf):
        produced = generate(args.source, sf, args.seed, args.out, formats, args.shards)
        summary[str(sf)] = {kind: [str(p) for p in paths] if isinstance(paths, list) else str(paths)
                            for kind, paths in produced.items()}
    dump_stats('datagen', {'seed': args.seed, 'outputs': summary})
    return 0


if __name__ == "__main__":
    sys.exit(main())
