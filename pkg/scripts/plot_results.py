"""
Plot smcdma result tables.

Reads the CSV files written by a scenario run (sinr.csv, ber.csv,
interference.csv, bounds.csv) from a result directory and renders them as
plotly HTML figures next to the data.

Usage:
    python scripts/plot_results.py results/sinr-convergence
"""

from pathlib import Path

import click
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go


def sinr_figure(frame: pd.DataFrame) -> go.Figure:
    fig = px.line(frame, x="iteration", y="mean_sinr_db", color="algorithm")
    fig.update_layout(xaxis_title="symbols", yaxis_title="SINR (dB)")
    return fig


def ber_figure(frame: pd.DataFrame, column: str, x_title: str, log_x: bool) -> go.Figure:
    fig = px.line(frame, x="x_value", y=column, color="algorithm", markers=True,
                  log_x=log_x, log_y=column == "ber")
    fig.update_layout(xaxis_title=x_title, yaxis_title=column.upper())
    return fig


def interference_figure(frame: pd.DataFrame) -> go.Figure:
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=frame["iteration"], y=frame["genie_power"], name="actual"))
    fig.add_trace(go.Scatter(x=frame["iteration"], y=frame["v_hat"], name="estimated"))
    fig.update_layout(xaxis_title="symbols", yaxis_title="interference power")
    return fig


@click.command()
@click.argument("result_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--x-title", default="x", help="Axis title of the BER sweep.")
def main(result_dir: Path, x_title: str):
    """Render every known table found in RESULT_DIR."""
    written = []

    sinr_path = result_dir / "sinr.csv"
    if sinr_path.exists():
        path = result_dir / "sinr.html"
        sinr_figure(pd.read_csv(sinr_path)).write_html(path)
        written.append(path)

    ber_path = result_dir / "ber.csv"
    if ber_path.exists():
        frame = pd.read_csv(ber_path)
        log_x = bool((frame["x_value"] > 0).all() and frame["x_value"].max() / frame["x_value"].min() > 50)
        for column in ("ber", "ur"):
            path = result_dir / f"{column}.html"
            ber_figure(frame, column, x_title, log_x).write_html(path)
            written.append(path)

    interference_path = result_dir / "interference.csv"
    if interference_path.exists():
        path = result_dir / "interference.html"
        interference_figure(pd.read_csv(interference_path)).write_html(path)
        written.append(path)

    bounds_path = result_dir / "bounds.csv"
    if bounds_path.exists():
        path = result_dir / "bounds.html"
        px.line(pd.read_csv(bounds_path), x="symbol", y="gamma", color="algorithm").write_html(path)
        written.append(path)

    for path in written:
        click.echo(f"wrote {path}")
    if not written:
        click.echo("no result tables found", err=True)


if __name__ == "__main__":
    main()
