"""
Chart Components - Plotly views of spectral sequence pages
"""
import logging
from typing import Optional, Sequence

import plotly.graph_objects as go
from plotly.subplots import make_subplots

from gysin.spectra import SpectralPages

logger = logging.getLogger(__name__)


def _page_trace(sp: SpectralPages, r: Optional[int], show_scale: bool) -> go.Heatmap:
    frame = sp.table(r)
    groups = sp.infinity if r is None else sp.pages[r]
    # cell colour is the number of cyclic summands; hover shows the group
    z = [[groups[(p, n)].num_generators if (p, n) in groups else 0 for n in frame.columns] for p in frame.index]
    return go.Heatmap(
        x=[str(n) for n in frame.columns],
        y=[str(p) for p in frame.index],
        z=z,
        text=frame.values.tolist(),
        texttemplate="%{text}",
        hovertemplate="p=%{y} n=%{x}<br>%{text}<extra></extra>",
        colorscale="Blues",
        showscale=show_scale,
    )


def plot_pages(sp: SpectralPages, pages: Optional[Sequence[int]] = None, title: str = "Spectral sequence") -> go.Figure:
    """
    One heatmap per page, levels p on the vertical axis and degrees n on
    the horizontal one, followed by E^∞.
    """
    pages = list(range(sp.r_max + 1)) if pages is None else list(pages)
    names = [f"E^{r}" for r in pages] + ["E^∞"]
    fig = make_subplots(rows=1, cols=len(names), subplot_titles=names, horizontal_spacing=0.04)
    for col, r in enumerate(pages + [None], start=1):
        fig.add_trace(_page_trace(sp, r, show_scale=col == len(names)), row=1, col=col)
        fig.update_xaxes(title_text="n", row=1, col=col)
        fig.update_yaxes(title_text="p" if col == 1 else None, row=1, col=col)
    fig.update_layout(
        title=title,
        height=420,
        width=max(480, 320 * len(names)),
    )
    return fig


def write_chart(fig: go.Figure, path: str) -> None:
    fig.write_html(path, include_plotlyjs="cdn")
    logger.info("chart written to %s", path)
