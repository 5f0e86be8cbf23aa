# --- plot_response_times.py ---
# Barras agrupadas de tiempo de respuesta por backend a través de los SF,
# con barras de error = desviación estándar. Una imagen por CSV de figura.
#
# Salida determinista: backend Agg, sin metadatos de software en el PNG.

import logging
from pathlib import Path
from typing import Iterable

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from scripts.core.exceptions import IoFailure  # noqa: E402
from scripts.core.model import SCALE_FACTORS  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams.update({
    'font.size': 10,
    'font.family': 'sans-serif',
    'font.sans-serif': ['DejaVu Sans'],
    'axes.labelsize': 11,
    'axes.titlesize': 11,
    'legend.fontsize': 9,
    'savefig.dpi': 150,
    'savefig.bbox': 'tight',
})

# Un color fijo por sistema conocido; el resto usa el ciclo por defecto.
BACKEND_COLORS = {
    'BASEX': '#1f77b4',
    'EXISTDB': '#ff7f0e',
    'SEDNA': '#2ca02c',
    'MONGODB': '#d62728',
    'COUCHDB': '#9467bd',
    'COUCHBASE': '#8c564b',
}
GROUP_WIDTH = 0.8


def backends_in(frame: pd.DataFrame) -> list[str]:
    return [c[:-len('_AVG')] for c in frame.columns if c.endswith('_AVG')]


def plot_frame(frame: pd.DataFrame, ax, title: str = "") -> list:
    """
    Dibuja una tabla de figura en ax. Devuelve los BarContainer (uno por
    backend); el total de barras es backends × filas.
    """
    backends = backends_in(frame)
    containers = []
    positions = frame['NO_DOCS'].to_numpy(dtype=float) if 'NO_DOCS' in frame else []
    if backends and len(positions):
        width = GROUP_WIDTH / len(backends)
        for k, backend in enumerate(backends):
            offset = (k - (len(backends) - 1) / 2) * width
            containers.append(ax.bar(
                positions + offset,
                frame[f"{backend}_AVG"].fillna(0.0).to_numpy(),
                width=width,
                yerr=frame[f"{backend}_STD"].fillna(0.0).to_numpy(),
                capsize=2,
                color=BACKEND_COLORS.get(backend),
                label=backend,
            ))
        ax.legend(loc='upper left', ncol=2, frameon=False)
    ax.set_xticks([i + 1 for i in range(len(SCALE_FACTORS))])
    ax.set_xticklabels([f"SF={v:g}" for v in SCALE_FACTORS])
    ax.set_ylabel("Tiempo de respuesta [ms]")
    ax.grid(True, axis='y', linestyle='--', alpha=0.3)
    if title:
        ax.set_title(title)
    return containers


def emit_plots(csv_files: Iterable, out_dir) -> list[Path]:
    """
    Una imagen PNG por CSV de figura, con el mismo nombre base.
    Un CSV vacío produce ejes vacíos.

    Lanza IoFailure.
    """
    out_dir = Path(out_dir)
    images = []
    for csv_file in csv_files:
        csv_file = Path(csv_file)
        try:
            frame = pd.read_csv(csv_file)
        except pd.errors.EmptyDataError:
            frame = pd.DataFrame()
        fig, ax = plt.subplots(figsize=(6, 4))
        plot_frame(frame, ax, title=csv_file.stem)
        target = out_dir / f"{csv_file.stem}.png"
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            fig.savefig(target, format='png', metadata={'Software': None})
        except OSError as exc:
            raise IoFailure(target, str(exc)) from exc
        finally:
            plt.close(fig)
        images.append(target)
    logger.info("[report] %d imagen(es) en %s", len(images), out_dir)
    return images
