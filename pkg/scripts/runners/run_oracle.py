# --- run_oracle.py ---
# Evalúa consultas con el oráculo en memoria.
#
#   python scripts/runners/run_oracle.py --data data/dblp_sf1.jsonl --query "Q2(i=1,j=2)" --emit rows
#   python scripts/runners/run_oracle.py --data data/dblp_sf1.jsonl --query all --sf 1 \
#       --emit selectivity --out sel_sf1.csv
#
# --emit rows         filas de la proyección (CSV)
# --emit count        query,n
# --emit selectivity  sf,query,n,N,s (entrada de run_report)

import os
import sys

import pandas as pd

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.analysis.report_tables import selectivity_frame
from scripts.core.exceptions import IoFailure
from scripts.core.model import ScaleFactor
from scripts.core.oracle import evaluate, load, selectivity
from scripts.core.queries import parse_query_list
from scripts.utils.cli import add_query_arguments, base_parser, guarded, setup, terms_from
from scripts.utils.logs import dump_stats

EMIT_CHOICES = ('rows', 'count', 'selectivity')


def build_parser():
    parser = base_parser("Oráculo: resultados exactos y selectividad.")
    parser.add_argument('--data', required=True, help="archivo canónico")
    parser.add_argument('--query', required=True, help="Q2(i=1,j=2), lista, rango Q1..Q9 o all")
    parser.add_argument('--emit', choices=EMIT_CHOICES, default='rows')
    parser.add_argument('--sf', default='1', help="SF del archivo (columna sf de selectivity)")
    parser.add_argument('--out', default=None, help="CSV de salida (por defecto stdout)")
    parser.add_argument('--index', action='store_true', help="índice invertido de tokens")
    add_query_arguments(parser)
    return parser


def _frame(ds, queries, emit: str, sf: str) -> pd.DataFrame:
    if emit == 'selectivity':
        entries = [(sf, selectivity(ds, q, evaluate(ds, q))) for q in queries]
        return selectivity_frame(entries)
    if emit == 'count':
        return pd.DataFrame([(q.text, evaluate(ds, q).row_count) for q in queries],
                            columns=['query', 'n'])
    frames = []
    for q in queries:
        frame = pd.DataFrame(evaluate(ds, q).rows())
        frame.insert(0, 'query', q.text)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


@guarded
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup(args)
    sf = str(ScaleFactor.parse(args.sf))
    queries = parse_query_list(args.query, terms_from(args), args.case_sensitive)
    ds = load(args.data, build_index=args.index)
    frame = _frame(ds, queries, args.emit, sf)
    if args.out is None:
        frame.to_csv(sys.stdout, index=False)
    else:
        try:
            frame.to_csv(args.out, index=False)
        except OSError as exc:
            raise IoFailure(args.out, str(exc)) from exc
    dump_stats('oracle', {'records': ds.record_count, 'pairs': ds.pair_count,
                          'queries': len(queries), 'rows': len(frame)})
    return 0


if __name__ == "__main__":
    sys.exit(main())
