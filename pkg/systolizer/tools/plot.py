import logging
from pathlib import Path
from typing import Union

import networkx as nx
import plotly.graph_objects as go

from systolizer.pipeline.formatters import ComplexFormatter
from systolizer.tools.complex import TypedComplex

logger = logging.getLogger(__name__)

LAYOUT_SEED = 7


def complex_figure(complex_: TypedComplex, title: str = "") -> go.Figure:
    """
    Creates a Plotly figure of the 1-skeleton of a complex

    Args:
        complex_: the complex to draw
        title: figure title, defaults to the complex kind

    Returns:
        A figure with one trace per edge origin and one vertex trace
    """
    graph = complex_.graph
    positions = nx.spring_layout(graph, seed=LAYOUT_SEED) if len(graph) else {}

    figure = go.Figure()
    by_origin = {}
    for edge, origin in sorted(complex_.edges.items(), key=lambda item: sorted(item[0])):
        by_origin.setdefault(origin, []).append(sorted(edge))
    for origin, edges in sorted(by_origin.items()):
        xs, ys = [], []
        for u, v in edges:
            xs += [positions[u][0], positions[v][0], None]
            ys += [positions[u][1], positions[v][1], None]
        dash = {"dashed": "dash", "dotted": "dot"}.get(ComplexFormatter.edge_style(origin), "solid")
        width = 3 if origin == "friend" else 1
        figure.add_trace(go.Scatter(
            x=xs, y=ys, mode="lines", name=origin, hoverinfo="skip",
            line=dict(dash=dash, width=width, color="green" if origin == "friend" else "gray"),
        ))

    ids = sorted(complex_.vertices)
    figure.add_trace(go.Scatter(
        x=[positions[v][0] for v in ids],
        y=[positions[v][1] for v in ids],
        mode="markers",
        name="vertices",
        text=ids,
        hoverinfo="text",
        marker=dict(size=8, color=[ComplexFormatter.vertex_color(complex_, v) for v in ids]),
    ))
    figure.update_layout(
        title=title or complex_.metadata.get("kind", "complex"),
        showlegend=True,
        xaxis=dict(visible=False),
        yaxis=dict(visible=False),
    )
    return figure


def render_complex_html(complex_: TypedComplex, path: Union[str, Path]) -> Path:
    path = Path(path)
    complex_figure(complex_).write_html(str(path))
    logger.info(f"[export] wrote {len(complex_.vertices)} vertices to {path}")
    return path
