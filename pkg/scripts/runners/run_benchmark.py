# --- run_benchmark.py ---
# Ejecuta la suite de consultas contra un backend configurado.
#
#   python scripts/runners/run_benchmark.py --config configs/backends.yaml \
#       --backend mongodb --sf 0.125 --queries Q1..Q9 --runs 10 --out results/runs.csv
#
# Con --load primero carga los archivos emitidos y verifica el conteo
# (la carga no forma parte de las métricas). Las filas se agregan a runs.csv
# con --append.

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.adapters import create_adapter
from scripts.core.bench import (
    DEFAULT_RUNS, Outcome, PrefillMode, Protocol, load_dataset, run_suite, write_runs,
)
from scripts.core.config import load_config, select_backend
from scripts.core.model import ScaleFactor
from scripts.core.queries import parse_query_list
from scripts.utils.cli import add_query_arguments, base_parser, guarded, setup, terms_from
from scripts.utils.logs import dump_stats


def build_parser():
    parser = base_parser("Mide tiempos de respuesta de Q1–Q9 en un backend.")
    parser.add_argument('--config', required=True, help="YAML de backends")
    parser.add_argument('--backend', required=True)
    parser.add_argument('--sf', required=True, help="0.125, 0.25, 0.5 o 1")
    parser.add_argument('--queries', default='Q1..Q9')
    parser.add_argument('--runs', type=int, default=DEFAULT_RUNS, help="warm runs por consulta")
    parser.add_argument('--prefill', choices=[m.value for m in PrefillMode],
                        default=PrefillMode.QUERY.value)
    parser.add_argument('--out', default='runs.csv')
    parser.add_argument('--append', action='store_true')
    parser.add_argument('--load', nargs='*', default=None, metavar='FILE',
                        help="archivos emitidos a cargar antes de medir")
    parser.add_argument('--progress', action='store_true')
    add_query_arguments(parser)
    return parser


@guarded
def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup(args)
    if args.runs < 0:
        parser.error("--runs debe ser >= 0")
    sf = ScaleFactor.parse(args.sf)
    cfg = select_backend(load_config(args.config), args.backend)
    queries = parse_query_list(args.queries, terms_from(args), args.case_sensitive)
    protocol = Protocol(runs=args.runs, cold_prefill=args.prefill != PrefillMode.NONE.value,
                        prefill=args.prefill)

    with create_adapter(cfg) as adapter:
        if args.load:
            load_dataset(cfg, adapter, args.load)
        records = run_suite(cfg, adapter, queries, str(sf), protocol, progress=args.progress)
    write_runs(records, args.out, append=args.append)

    dump_stats('bench', {
        'backend': cfg.name,
        'sf': str(sf),
        'queries': len(queries),
        'runs': len(records),
        'failed': sum(1 for r in records if r.outcome != Outcome.SUCCESS),
        'out': str(args.out),
    })
    return 0


if __name__ == "__main__":
    sys.exit(main())
