"""Figure generation using Plotly; static SVG export goes through kaleido."""
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd
import plotly.graph_objects as go

from ..data import MODE_CENTERS, quality

PALETTE = ['#667eea', '#fa709a', '#43e97b', '#fee140', '#4facfe', '#764ba2']
AXIS_RANGE = (-0.8, 0.8)
CONTOUR_RESOLUTION = 161

METRIC_TITLES = {
    "label_error": "Label error",
    "likelihood": "Likelihood score",
    "diversity": "Diversity score",
}


def _rgba(hex_color: str, alpha: float) -> str:
    r, g, b = (int(hex_color[i:i + 2], 16) for i in (1, 3, 5))
    return f"rgba({r}, {g}, {b}, {alpha})"


def create_samples_scatter(samples: Dict[str, np.ndarray], condition: float) -> go.Figure:
    """
    Generated designs over the performance contour.

    Args:
        samples: Mapping of series name to (n, 2) design arrays
        condition: Normalized condition the designs were generated at

    Returns:
        Figure with fixed axes so runs are visually comparable
    """
    grid = np.linspace(AXIS_RANGE[0], AXIS_RANGE[1], CONTOUR_RESOLUTION)
    xx, yy = np.meshgrid(grid, grid)
    zz = quality(np.column_stack([xx.ravel(), yy.ravel()])).values.reshape(xx.shape)

    fig = go.Figure()
    fig.add_trace(go.Contour(
        x=grid, y=grid, z=zz,
        colorscale='Greys',
        showscale=False,
        contours=dict(coloring='lines'),
        name='q(x)',
    ))
    fig.add_trace(go.Scatter(
        x=MODE_CENTERS[:, 0], y=MODE_CENTERS[:, 1],
        mode='markers',
        marker=dict(symbol='x', size=10, color='black'),
        name='modes',
    ))
    for i, (name, points) in enumerate(samples.items()):
        fig.add_trace(go.Scatter(
            x=points[:, 0], y=points[:, 1],
            mode='markers',
            marker=dict(size=3, color=PALETTE[i % len(PALETTE)], opacity=0.6),
            name=name,
        ))

    fig.update_layout(
        title=f'Generated designs at condition {condition:g}',
        xaxis=dict(range=list(AXIS_RANGE), title='x1', constrain='domain'),
        yaxis=dict(range=list(AXIS_RANGE), title='x2', scaleanchor='x', scaleratio=1),
        template='plotly_white',
        width=600,
        height=600,
        font=dict(family='Arial', size=12),
    )
    return fig


def create_metric_curves(metric: str, curves: Dict[str, pd.DataFrame]) -> go.Figure:
    """
    Metric versus condition with a mean +/- std band per series.

    Args:
        metric: One of label_error, likelihood, diversity
        curves: Mapping of series name to frames with condition, mean and std columns
    """
    fig = go.Figure()
    for i, (name, frame) in enumerate(curves.items()):
        color = PALETTE[i % len(PALETTE)]
        x = frame['condition'].to_numpy()
        mean = frame['mean'].to_numpy()
        std = frame['std'].fillna(0.0).to_numpy()
        fig.add_trace(go.Scatter(
            x=np.concatenate([x, x[::-1]]),
            y=np.concatenate([mean + std, (mean - std)[::-1]]),
            fill='toself',
            fillcolor=_rgba(color, 0.2),
            line=dict(width=0),
            hoverinfo='skip',
            showlegend=False,
        ))
        fig.add_trace(go.Scatter(
            x=x, y=mean,
            mode='lines+markers',
            line=dict(color=color, width=2),
            name=name,
        ))

    fig.update_layout(
        title=METRIC_TITLES.get(metric, metric),
        xaxis_title='Condition',
        yaxis_title=METRIC_TITLES.get(metric, metric),
        template='plotly_white',
        height=400,
        width=640,
        font=dict(family='Arial', size=12),
    )
    return fig


def create_empty_chart(message: str) -> go.Figure:
    """Blank axes carrying a centred message."""
    fig = go.Figure()

    fig.add_annotation(
        text=message,
        xref="paper",
        yref="paper",
        x=0.5,
        y=0.5,
        showarrow=False,
        font=dict(size=20, color="gray")
    )

    fig.update_layout(
        xaxis=dict(visible=False),
        yaxis=dict(visible=False),
        template='plotly_white',
        height=300
    )
    return fig


def save_svg(fig: go.Figure, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.write_image(str(path), format='svg')
    return path
