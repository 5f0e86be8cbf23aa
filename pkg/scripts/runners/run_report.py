# --- run_report.py ---
# runs.csv (+ selectividad del oráculo) → CSV de figuras, tablas y gráficos.
#
#   python scripts/runners/run_report.py --runs results/runs.csv \
#       --selectivity results/sel_sf1.csv --out manuscript/figures --plots

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.analysis.report_tables import (
    AGGREGATION_TABLE, FILTER_TABLE, SUMMARY_FILE, emit_figure_csv, read_selectivity, summarize,
)
from scripts.core.bench import read_runs
from scripts.utils.cli import base_parser, guarded, setup
from scripts.utils.logs import dump_stats
from scripts.visualization.plot_response_times import emit_plots

NON_FIGURE_FILES = {SUMMARY_FILE, FILTER_TABLE, AGGREGATION_TABLE}


def build_parser():
    parser = base_parser("Resume runs.csv en los CSV de figuras y tablas de selectividad.")
    parser.add_argument('--runs', required=True, nargs='+', help="uno o más runs.csv")
    parser.add_argument('--selectivity', nargs='*', default=[], help="CSV sf,query,n,N,s")
    parser.add_argument('--out', required=True)
    parser.add_argument('--plots', action='store_true', help="también imágenes PNG")
    return parser


@guarded
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup(args)
    runs = [r for path in args.runs for r in read_runs(path)]
    selectivity = [entry for path in args.selectivity for entry in read_selectivity(path)]
    stats = summarize(runs)
    written = emit_figure_csv(stats, selectivity, args.out)
    images = []
    if args.plots:
        images = emit_plots([p for p in written if p.name not in NON_FIGURE_FILES], args.out)
    dump_stats('report', {
        'runs': len(runs),
        'groups': len(stats),
        'without_success': sum(1 for s in stats if s.mean_ms is None),
        'csv': len(written),
        'images': len(images),
    })
    return 0


if __name__ == "__main__":
    sys.exit(main())
