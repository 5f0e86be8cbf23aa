# --- run_translate.py ---
# Compila consultas a los dialectos de los backends.
#
#   python scripts/runners/run_translate.py --query "Q6" --dialect N1QL
#   python scripts/runners/run_translate.py --query all --dialect all --out translated/
#
# Con --out escribe <dialecto>/<etiqueta><ext> y <etiqueta>.setup-<n><ext>
# (.xq, .js, .http, .n1ql). Sin --out imprime en stdout.

import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from scripts.core.exceptions import IoFailure
from scripts.core.queries import parse_query_list
from scripts.core.translate import DEFAULT_COLLECTION, Dialect, explain, output_names, translate
from scripts.utils.cli import add_query_arguments, base_parser, guarded, setup, terms_from


def build_parser():
    parser = base_parser("Traduce consultas Q1–Q9 a cada dialecto.")
    parser.add_argument('--query', required=True, help="Q2(i=1,j=2), lista, rango o all")
    parser.add_argument('--dialect', required=True,
                        help="XQuery31, XQuery10, MongoPipeline, CouchMangoView, N1QL o all")
    parser.add_argument('--out', default=None, help="directorio de salida")
    parser.add_argument('--collection', default=DEFAULT_COLLECTION)
    parser.add_argument('--explain', action='store_true', help="imprime las notas de estrategia")
    add_query_arguments(parser)
    return parser


def dialects(text: str) -> list[Dialect]:
    if text.strip().lower() == 'all':
        return list(Dialect)
    return [Dialect(part.strip()) for part in text.split(',')]


@guarded
def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup(args)
    try:
        targets = dialects(args.dialect)
    except ValueError:
        parser.error(f"dialecto desconocido: {args.dialect}")
    queries = parse_query_list(args.query, terms_from(args), args.case_sensitive)

    for dialect in targets:
        for q in queries:
            tq = translate(q, dialect, args.collection)
            texts = [tq.main_text, *tq.setup_texts]
            if args.out is None:
                sys.stdout.write(f"-- {q.text} [{dialect.value}]\n")
                for text in [*tq.setup_texts, tq.main_text]:
                    sys.stdout.write(text)
                if args.explain:
                    for note in explain(q, dialect, args.collection):
                        sys.stdout.write(f"   # {note}\n")
                continue
            folder = Path(args.out) / dialect.value
            try:
                folder.mkdir(parents=True, exist_ok=True)
                for name, text in zip(output_names(q, tq), texts):
                    (folder / name).write_text(text, encoding='utf-8', newline='\n')
            except OSError as exc:
                raise IoFailure(folder, str(exc)) from exc
    return 0


if __name__ == "__main__":
    sys.exit(main())
