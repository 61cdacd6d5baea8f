"""Plain-text tables, JSON/CSV serialization and atomic artifact bundles.

Table layout convention: coefficient with significance stars, standard error
in parentheses underneath the same cell, one column per model, and a legend
line spelling out the star thresholds.  All output is deterministic; floats
render through repr-stable fixed formats.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..econometrics.hypotests import TestResult
from ..econometrics.ols import OlsFit
from ..errors import RenderError
from ..forest import ImportanceReport
from ..stress import ScenarioConfig, StressResult
from .manifest import RunManifest

COEF_LEGEND = (
    "Significance levels: ˙ p < 0.10, * p < 0.05, ** p < 0.01, *** p < 0.001."
)
SCAN_LEGEND = "Significance levels: *** p < 0.01, ** p < 0.05, * p < 0.10."


def coef_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.10:
        return "˙"
    return ""


def scan_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def sig4(value: float) -> str:
    """Four significant digits, the rounding used in scenario write-ups."""
    if value == 0:
        return "0"
    return f"{value:.4g}"


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _pad(cell: str, width: int, right: bool = True) -> str:
    return cell.rjust(width) if right else cell.ljust(width)


def _table(rows: list[list[str]], right_from: int = 1) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [
            _pad(cell, widths[i], right=i >= right_from) for i, cell in enumerate(r)
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def regression_table(
    fits: dict[str, OlsFit],
    title: str,
    manifest: RunManifest,
    se_kind: str = "selected",
) -> str:
    """Side-by-side coefficient table for one or more fitted models."""
    if not fits:
        raise RenderError("regression table needs at least one fitted model")
    labels = list(fits)
    term_order: list[str] = []
    for fit in fits.values():
        for name in fit.names:
            if name not in term_order:
                term_order.append(name)

    rows = [[""] + labels]
    for term in term_order:
        coef_cells, se_cells = [], []
        for fit in fits.values():
            if term in fit.names:
                i = fit.names.index(term)
                se = fit.se_hc3[i] if fit.cov_used == "HC3" else fit.se_classical[i]
                if se_kind == "classical":
                    se = fit.se_classical[i]
                elif se_kind == "hc3":
                    se = fit.se_hc3[i]
                coef_cells.append(f"{fit.beta[i]:.4f}{coef_stars(fit.p_values[i])}")
                se_cells.append(f"({se:.4f})")
            else:
                coef_cells.append("--")
                se_cells.append("")
        rows.append([term] + coef_cells)
        rows.append([""] + se_cells)
    rows.append(["Observations"] + [str(f.n) for f in fits.values()])
    rows.append(["R-squared"] + [f"{f.r2:.4f}" for f in fits.values()])
    rows.append(["Adj. R-squared"] + [f"{f.adj_r2:.4f}" for f in fits.values()])

    lines = manifest.header_lines() + ["", title, "", _table(rows), "", COEF_LEGEND, ""]
    return "\n".join(lines)


def regression_csv(fit: OlsFit) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["term", "beta", "se_classical", "se_hc3", "t", "p"])
    for i, name in enumerate(fit.names):
        writer.writerow(
            [
                name,
                f"{fit.beta[i]:.10g}",
                f"{fit.se_classical[i]:.10g}",
                f"{fit.se_hc3[i]:.10g}",
                f"{fit.t_stats[i]:.10g}",
                f"{fit.p_values[i]:.10g}",
            ]
        )
    return buf.getvalue()


def summary_table(rows: list[dict], title: str, manifest: RunManifest) -> str:
    body = [["Metric", "Mean", "Std. Dev.", "Min", "Max"]]
    for row in rows:
        body.append(
            [
                row["column"],
                f"{row['mean']:.4g}",
                f"{row['std']:.4g}",
                f"{row['min']:.4g}",
                f"{row['max']:.4g}",
            ]
        )
    return "\n".join(manifest.header_lines() + ["", title, "", _table(body), ""])


def vif_table(values: dict[str, float], manifest: RunManifest) -> str:
    body = [["Variable", "VIF"]]
    for name, v in sorted(values.items(), key=lambda kv: -kv[1]):
        body.append([name, f"{v:.2f}"])
    note = (
        "All VIF values below 5 indicate no multicollinearity concern."
        if all(v < 5 for v in values.values())
        else "VIF values of 5 or more flag potential multicollinearity."
    )
    return "\n".join(
        manifest.header_lines()
        + ["", "Variance Inflation Factors", "", _table(body), "", note, ""]
    )


def test_table(
    results: list[tuple[str, TestResult]], title: str, manifest: RunManifest
) -> str:
    """Generic hypothesis-test listing (variable, lag, statistic, p, stars)."""
    body = [["Variable", "Lag", "Statistic", "p-value", ""]]
    for label, res in results:
        body.append(
            [
                label,
                "" if res.lag is None else str(res.lag),
                f"{res.statistic:.4f}",
                f"{res.p_value:.4f}",
                scan_stars(res.p_value),
            ]
        )
    return "\n".join(
        manifest.header_lines() + ["", title, "", _table(body), "", SCAN_LEGEND, ""]
    )


def importance_table(report: ImportanceReport, manifest: RunManifest) -> str:
    body = [["Feature", "Gini", "Permutation"]]
    order = sorted(report.gini, key=lambda k: -report.gini[k])
    for name in order:
        body.append(
            [name, f"{report.gini[name]:.4f}", f"{report.permutation[name]:.4f}"]
        )
    lines = manifest.header_lines() + ["", "Feature Importance", "", _table(body)]
    if report.no_splits:
        lines.append("")
        lines.append("note: the forest contains no splits; importances are degenerate.")
    lines.append("")
    return "\n".join(lines)


def stress_text(
    config: ScenarioConfig, result: StressResult, manifest: RunManifest
) -> str:
    lines = manifest.header_lines() + [
        "",
        "Depeg-Liquidation Stress Test",
        "",
        f"lending params        ltv={sig4(config.params.ltv)}  lt={sig4(config.params.lt)}",
        f"collateral            {sig4(config.collateral)}",
        f"depeg                  {sig4(config.depeg)} ({sig4(config.depeg * 100)}%)",
        "",
        f"debt at max ltv        {sig4(result.debt)}",
        f"health factor          {sig4(result.health_factor)}",
        f"critical depeg         {sig4(result.critical_depeg)} ({sig4(result.critical_depeg * 100)}%)",
        f"liquidatable           {'yes' if result.liquidatable else 'no'}",
        f"liquidated volume      {sig4(result.liquidated_volume)}",
        "",
        f"local DEX coverage     {sig4(result.local_coverage)} ({sig4(result.local_coverage * 100)}%)",
        f"mainnet coverage       {sig4(result.mainnet_coverage)} ({sig4(result.mainnet_coverage * 100)}%)",
        f"LSP unwind             {sig4(result.lsp_unwind)} ({sig4(result.lsp_unwind * 100)}%)",
        "",
        "cascade stages:",
    ]
    body = [["stage", "inflow", "absorbed", "residual"]]
    for s in result.stages:
        body.append([s.stage, sig4(s.inflow), sig4(s.absorbed), sig4(s.residual)])
    lines.append(_table(body))
    lines.append("")
    return "\n".join(lines)


def write_artifacts(out_dir: str | Path, files: dict[str, str]) -> list[Path]:
    """Write a fully-materialized artifact bundle.

    The bundle is validated before anything touches disk: an empty bundle or
    empty file content raises and leaves no partial output behind.
    """
    if not files:
        raise RenderError("empty results bundle; nothing to write")
    for name, content in files.items():
        if not isinstance(content, str) or not content:
            raise RenderError(f"artifact {name!r} has empty content")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in files.items():
        target = out / name
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(target.suffix + ".tmp")
        tmp.write_text(content, encoding="utf-8")
        tmp.replace(target)
        written.append(target)
    return written
