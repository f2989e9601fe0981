"""Render the five figure layouts from cmentropy CSV artifacts.

The renderer never computes numbers beyond axis transforms: every plotted
value, including the reference guide curves, comes from the CSV files. Input
schemas are validated strictly (missing or unknown columns are errors naming
the offending column). Rendering is pure: the same CSVs and spec produce
byte-identical SVG output under the pinned style sheet.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE_FILE = Path(__file__).with_name("style.mplstyle")

RATE_COLUMNS = ("D", "remote_lb1", "remote_lb2", "coop_tight", "coop_weak",
                "ceo_ub", "loss_lb", "loss_ub_thm9", "loss_ub_thm10",
                "loss_ub_prev", "loss_gauss_exact")

SCHEMAS: dict[str, tuple[str, ...]] = {
    "fig3": ("sigma_x2", "truth", "truth_err", "lower_main", "lower_main_err",
             "ub_jensen", "ub_jensen_err", "ub_linear", "ub_linear_err"),
    "fig4": ("sigma_x2", "alpha", "n_y_alpha", "n_y_alpha_err",
             "gap_main", "gap_main_err", "gap_costa", "gap_costa_err"),
    "fig5": RATE_COLUMNS,
    "fig6": RATE_COLUMNS,
    "fig7": ("d", "gap_analytic", "guide_small_d", "guide_large_d",
             "gap_numeric", "gap_numeric_err"),
}

EXPECTED_FILE_COUNT = {"fig3": 3, "fig4": 1, "fig5": 3, "fig6": 3, "fig7": 1}


class SchemaError(ValueError):
    """A CSV does not match the documented schema for the requested figure."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    csv_paths: tuple[Path, ...]
    out_path: Path
    log_x: bool = False
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.figure_id not in SCHEMAS:
            raise SchemaError(f"unknown figure id {self.figure_id!r}")
        want = EXPECTED_FILE_COUNT[self.figure_id]
        if len(self.csv_paths) != want:
            raise SchemaError(
                f"{self.figure_id} needs exactly {want} CSV file(s), "
                f"got {len(self.csv_paths)}")


@dataclass
class RenderResult:
    out_path: Path
    n_panels: int
    n_curves: int


def _read_table(path: Path, figure_id: str) -> dict[str, list[float]]:
    if not path.exists():
        raise SchemaError(f"input CSV does not exist: {path}")
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path.name}: empty file") from None
        want = SCHEMAS[figure_id]
        for col in header:
            if col not in want:
                raise SchemaError(f"{path.name}: unknown column {col!r}")
        for col in want:
            if col not in header:
                raise SchemaError(f"{path.name}: missing column {col!r}")
        idx = {col: header.index(col) for col in want}
        table: dict[str, list[float]] = {col: [] for col in want}
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(f"{path.name}: ragged row {row!r}")
            for col in want:
                cell = row[idx[col]].strip()
                table[col].append(float(cell) if cell else math.nan)
    if not table[want[0]]:
        raise SchemaError(f"{path.name}: no data rows")
    return table


def _label_from(path: Path, prefix: str) -> str:
    stem = path.stem
    return stem[len(prefix) + 1:] if stem.startswith(prefix + "_") else stem


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns panel/curve counts for verification."""
    tables = [_read_table(p, spec.figure_id) for p in spec.csv_paths]
    with plt.style.context(str(STYLE_FILE)):
        if spec.figure_id == "fig3":
            result = _render_fig3(spec, tables)
        elif spec.figure_id == "fig4":
            result = _render_fig4(spec, tables)
        elif spec.figure_id in ("fig5", "fig6"):
            result = _render_rate(spec, tables)
        else:
            result = _render_fig7(spec, tables)
    return result


def _save(fig, spec: FigureSpec, n_panels: int, n_curves: int) -> RenderResult:
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path, format=spec.out_path.suffix.lstrip(".") or "svg",
                metadata={"Date": None} if spec.out_path.suffix == ".svg" else None)
    plt.close(fig)
    return RenderResult(out_path=spec.out_path, n_panels=n_panels,
                        n_curves=n_curves)


def _render_fig3(spec, tables) -> RenderResult:
    curves = (("truth", "h(E[X|Y])"), ("lower_main", "2h(X) - h(Y)"),
              ("ub_jensen", "Jensen upper bound"),
              ("ub_linear", "linear-mmse upper bound"))
    fig, axes = plt.subplots(1, 3, sharex=False)
    n_curves = 0
    for ax, table, path in zip(axes, tables, spec.csv_paths):
        for col, label in curves:
            ax.plot(table["sigma_x2"], table[col], label=label)
            n_curves += 1
        ax.set_title(_label_from(path, "fig3"))
        ax.set_xlabel("input variance")
    axes[0].set_ylabel("nats")
    axes[0].legend()
    return _save(fig, spec, n_panels=3, n_curves=n_curves)


def _render_fig4(spec, tables) -> RenderResult:
    table = tables[0]
    alphas = sorted(set(a for a in table["alpha"] if not math.isnan(a)))
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    n_curves = 0
    for alpha in alphas:
        rows = [i for i, a in enumerate(table["alpha"]) if a == alpha]
        x = [table["sigma_x2"][i] for i in rows]
        for col, tag in (("gap_main", "conditional-variance bound"),
                         ("gap_costa", "concavity bound")):
            ax.plot(x, [table[col][i] for i in rows],
                    label=f"{tag}, alpha={alpha:g}")
            n_curves += 1
    ax.set_xlabel("input variance")
    ax.set_ylabel("gap to N(Y_alpha)")
    ax.legend()
    return _save(fig, spec, n_panels=1, n_curves=n_curves)


def _render_rate(spec, tables) -> RenderResult:
    loss_curves = (("loss_ub_thm10", "tight upper bound"),
                   ("loss_ub_thm9", "weak upper bound"),
                   ("loss_ub_prev", "previous upper bound"),
                   ("loss_lb", "lower bound"),
                   ("loss_gauss_exact", "Gaussian exact loss"))
    fig, axes = plt.subplots(1, len(tables), sharey=True)
    if len(tables) == 1:
        axes = [axes]
    n_curves = 0
    for ax, table, path in zip(axes, tables, spec.csv_paths):
        for col, label in loss_curves:
            if all(math.isnan(v) for v in table[col]):
                continue
            ax.plot(table["D"], table[col], label=label)
            n_curves += 1
        ax.set_title(_label_from(path, spec.figure_id))
        ax.set_xlabel("distortion D")
    axes[0].set_ylabel("rate loss (nats)")
    axes[0].legend()
    return _save(fig, spec, n_panels=len(tables), n_curves=n_curves)


def _render_fig7(spec, tables) -> RenderResult:
    table = tables[0]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(table["d"], table["gap_analytic"], label="gap")
    ax.plot(table["d"], table["guide_small_d"], "--", label="2/d")
    ax.plot(table["d"], table["guide_large_d"], ":", label="2/(3d)")
    n_curves = 3
    if not all(math.isnan(v) for v in table["gap_numeric"]):
        ax.plot(table["d"], table["gap_numeric"], "o", label="quadrature check")
        n_curves += 1
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("shape difference d")
    ax.set_ylabel("gap to the lower bound (nats)")
    ax.legend()
    return _save(fig, spec, n_panels=1, n_curves=n_curves)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figrender", description="Render cmentropy figure CSVs")
    parser.add_argument("--spec", required=True, choices=sorted(SCHEMAS),
                        help="figure id")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path (.svg/.pdf/.png)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(figure_id=args.spec,
                          csv_paths=tuple(Path(p) for p in args.inputs),
                          out_path=Path(args.out))
        result = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path} ({result.n_panels} panel(s), "
          f"{result.n_curves} curve(s))")
    return 0


if __name__ == "__main__":
    sys.exit(main())
