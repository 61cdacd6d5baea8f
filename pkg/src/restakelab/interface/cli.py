"""Command-line entry point.

One binary, subcommand style.  Every subcommand accepts --out (artifact
directory), --seed and --offline; artifacts embed a run manifest and are
byte-identical for identical inputs.  Exit codes: 0 success, 1 engine
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .. import __version__
from .._paths import fixtures_dir, scenarios_dir
from ..econometrics import vif
from ..errors import RestakelabError
from ..flowgraph import exposure_paths, graph_metrics, load_graph
from ..forest import ForestConfig, MaxFeaturesRule
from ..pipeline import (
    EVENT_DATES,
    SeriesCache,
    SourceDescriptor,
    engineer_features,
    fetch_series,
    frame_summary,
    panel_summary,
    read_panel_csv,
)
from ..stress import ScenarioConfig
from . import ops, render
from .manifest import RunManifest
from .svgplot import Series, timeseries_svg


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--out", default="artifacts", help="artifact output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    parser.add_argument(
        "--offline",
        action="store_true",
        default=_env_flag("RESTAKELAB_OFFLINE"),
        help="never touch the network; cache/fixtures only "
        "(default on when RESTAKELAB_OFFLINE is set)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restakelab",
        description="liquid-restaking revenue analytics and depeg stress engine",
    )
    parser.add_argument("--version", action="version", version=f"restakelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch sources from a descriptor manifest")
    _common(p)
    p.add_argument("--manifest", required=True, help="JSON file with a sources[] list")
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="engineer the regression panel from a raw CSV")
    _common(p)
    p.add_argument("--input", required=True, help="raw panel CSV")
    p.add_argument("--ffill", action="store_true", help="forward-fill gaps")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("regress", help="fit the lag-0/1/2 model family")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--model", type=int, choices=(1, 2, 3), action="append", default=None)
    p.add_argument("--cov", choices=("classical", "hc3"), default="classical")
    p.add_argument("--robust", action="store_true", help="winsorize + HC3 errors")
    p.add_argument("--winsor-lower", type=float, default=0.01)
    p.add_argument("--winsor-upper", type=float, default=0.99)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("granger", help="predictive-precedence scan")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--cause", required=True, help="engineered column name")
    p.add_argument("--effect", default="Revenue")
    p.add_argument("--max-lag", type=int, default=5)
    p.set_defaults(func=cmd_granger)

    p = sub.add_parser("forest", help="random-forest feature importance")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--trees", type=int, default=500)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument(
        "--max-features",
        choices=[r.value for r in MaxFeaturesRule],
        default=MaxFeaturesRule.ALL_OVER_THREE.value,
    )
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--include-events", action="store_true")
    p.add_argument("--holdout", type=float, default=None, help="score on a held-out tail")
    p.set_defaults(func=cmd_forest)

    p = sub.add_parser("stress", help="depeg-liquidation stress test")
    stress_sub = p.add_subparsers(dest="stress_command", required=True)
    pr = stress_sub.add_parser("run", help="run one scenario config")
    _common(pr)
    pr.add_argument("--config", required=True)
    pr.add_argument("--graph", default=None, help="optional graph fixture for context")
    pr.set_defaults(func=cmd_stress_run)
    ps = stress_sub.add_parser("sweep", help="health-factor curve over a depeg grid")
    _common(ps)
    ps.add_argument("--config", required=True)
    ps.add_argument("--from", dest="from_depeg", type=float, default=0.0)
    ps.add_argument("--to", dest="to_depeg", type=float, default=0.10)
    ps.add_argument("--steps", type=int, default=21)
    ps.set_defaults(func=cmd_stress_sweep)

    p = sub.add_parser("graph", help="value-flow graph inspection")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    pm = graph_sub.add_parser("metrics", help="uninflated TVL, bridge shares, margin")
    _common(pm)
    pm.add_argument("--fixture", default="fig5_2025-10-04")
    pm.add_argument("--allow-stale", action="store_true")
    pm.set_defaults(func=cmd_graph_metrics)
    pp = graph_sub.add_parser("paths", help="exposure paths between two nodes")
    _common(pp)
    pp.add_argument("--fixture", default="fig5_2025-10-04")
    pp.add_argument("--source", required=True)
    pp.add_argument("--sink", required=True)
    pp.add_argument("--max-depth", type=int, default=6)
    pp.add_argument("--allow-stale", action="store_true")
    pp.set_defaults(func=cmd_graph_paths)

    p = sub.add_parser("report", help="full analysis bundle on a raw panel")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--trees", type=int, default=200)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--max-lag", type=int, default=5)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="HTTP JSON service plus the explorer UI")
    _common(p)
    p.add_argument("--bind", default=os.environ.get("RESTAKELAB_BIND", "127.0.0.1:8000"))
    p.add_argument("--graph", default="fig5_2025-10-04")
    p.add_argument(
        "--scenario", default=str(scenarios_dir() / "paper_linea_2025-10-04.json")
    )
    p.add_argument("--ui-dir", default=None)
    p.add_argument("--allow-stale", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


# -- subcommand bodies --------------------------------------------------------


def cmd_ingest(args) -> dict[str, str]:
    doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    descriptors = [SourceDescriptor.from_dict(d) for d in doc.get("sources", [])]
    cache = SeriesCache(args.cache_dir) if args.cache_dir else SeriesCache()
    manifest = RunManifest.build("ingest", [args.manifest], {"global": args.seed})
    files: dict[str, str] = {}
    summary = []
    for desc in descriptors:
        series = fetch_series(desc, offline=args.offline, cache=cache)
        days = sorted(series.points)
        summary.append(
            {
                "series_name": series.series_name,
                "points": len(series.points),
                "first": days[0].isoformat() if days else None,
                "last": days[-1].isoformat() if days else None,
                "units": series.units,
            }
        )
        lines = ["date," + series.series_name]
        lines.extend(f"{day.isoformat()},{series.points[day]!r}" for day in days)
        files[f"series_{series.series_name}.csv"] = "\n".join(lines) + "\n"
    files["ingest_summary.json"] = render.json_text(
        {"manifest": manifest.to_dict(), "series": summary}
    )
    return files


def _load_frame(args):
    panel = read_panel_csv(args.input, ffill=getattr(args, "ffill", False))
    return panel, engineer_features(panel)


def cmd_features(args) -> dict[str, str]:
    panel, frame = _load_frame(args)
    manifest = RunManifest.build("features", [args.input], {"global": args.seed})
    X = frame.design
    header = ["date", X.y_name] + list(X.names)
    rows = [",".join(header)]
    for i, day in enumerate(X.dates):
        cells = [day.isoformat(), f"{X.y[i]:.10g}"]
        cells.extend(f"{X.columns[name][i]:.10g}" for name in X.names)
        rows.append(",".join(cells))
    return {
        "features.csv": "\n".join(rows) + "\n",
        "features.json": render.json_text(
            {"manifest": manifest.to_dict(), "frame": frame.to_dict()}
        ),
        "summary_raw.txt": render.summary_table(
            panel_summary(panel), "Raw Panel Summary", manifest
        ),
        "summary_features.txt": render.summary_table(
            frame_summary(frame), "Engineered Panel Summary", manifest
        ),
    }


def cmd_regress(args) -> dict[str, str]:
    _, frame = _load_frame(args)
    models = tuple(args.model) if args.model else (1, 2, 3)
    cov = "HC3" if args.cov == "hc3" else "Classical"
    fits = ops.regress_models(
        frame,
        models,
        cov=cov,
        robust=args.robust,
        lower=args.winsor_lower,
        upper=args.winsor_upper,
    )
    manifest = RunManifest.build("regress", [args.input], {"global": args.seed})
    title = "Robustness Check (winsorized, HC3)" if args.robust else "Regression Results"
    files = {
        "regression.txt": render.regression_table(fits, title, manifest),
        "regression.json": render.json_text(
            {"manifest": manifest.to_dict(), "fits": ops.model_tables_payload(fits)}
        ),
    }
    for model, fit in zip(models, fits.values()):
        files[f"regression_model{model}.csv"] = render.regression_csv(fit)
    return files


def cmd_granger(args) -> dict[str, str]:
    from ..econometrics import granger_scan

    _, frame = _load_frame(args)
    X = frame.design
    series = {X.y_name: X.y, **X.columns}
    for name in (args.cause, args.effect):
        if name not in series:
            raise RestakelabError(
                f"unknown column {name!r}; available: {sorted(series)}"
            )
    results = granger_scan(series[args.cause], series[args.effect], max_lag=args.max_lag)
    manifest = RunManifest.build("granger", [args.input], {"global": args.seed})
    labelled = [(f"{args.cause} (lag {r.lag})", r) for r in results]
    selected = next(r for r in results if r.selected)
    return {
        "granger.txt": render.test_table(
            labelled,
            f"Predictive Precedence: {args.cause} -> {args.effect}",
            manifest,
        ),
        "granger.json": render.json_text(
            {
                "manifest": manifest.to_dict(),
                "cause": args.cause,
                "effect": args.effect,
                "results": [r.to_dict() for r in results],
                "selected_lag": selected.lag,
            }
        ),
    }


def cmd_forest(args) -> dict[str, str]:
    _, frame = _load_frame(args)
    config = ForestConfig(
        n_trees=args.trees,
        max_features=MaxFeaturesRule(args.max_features),
        min_leaf=args.min_leaf,
        seed=args.seed,
    )
    report = ops.forest_importance(
        frame,
        config,
        repeats=args.repeats,
        include_events=args.include_events,
        holdout=args.holdout,
    )
    manifest = RunManifest.build("forest", [args.input], {"global": args.seed})
    return {
        "importance.txt": render.importance_table(report, manifest),
        "importance.json": render.json_text(
            {"manifest": manifest.to_dict(), "report": report.to_dict()}
        ),
    }


def cmd_stress_run(args) -> dict[str, str]:
    config = ScenarioConfig.from_file(args.config)
    graph = load_graph(args.graph) if args.graph else None
    _, result = ops.stress_pair(config, graph)
    manifest = RunManifest.build("stress run", [args.config], {"global": args.seed})
    return {
        "stress.txt": render.stress_text(config, result, manifest),
        "stress.json": render.json_text(
            {
                "manifest": manifest.to_dict(),
                "config": config.to_dict(),
                "result": result.to_dict(),
            }
        ),
    }


def cmd_stress_sweep(args) -> dict[str, str]:
    config = ScenarioConfig.from_file(args.config)
    points = ops.sweep(config, args.from_depeg, args.to_depeg, args.steps)
    manifest = RunManifest.build("stress sweep", [args.config], {"global": args.seed})
    rows = ["depeg,health_factor,liquidatable,liquidated_volume"]
    for delta, result in points:
        rows.append(
            f"{delta:.10g},{result.health_factor:.10g},"
            f"{int(result.liquidatable)},{result.liquidated_volume:.10g}"
        )
    return {
        "sweep.csv": "\n".join(rows) + "\n",
        "sweep.json": render.json_text(
            {
                "manifest": manifest.to_dict(),
                "config": config.to_dict(),
                "points": [
                    {"depeg": delta, "result": result.to_dict()} for delta, result in points
                ],
            }
        ),
    }


def cmd_graph_metrics(args) -> dict[str, str]:
    graph = load_graph(args.fixture, allow_stale=args.allow_stale)
    metrics = graph_metrics(graph)
    manifest = RunManifest.build("graph metrics", [], {"global": args.seed})
    margin = metrics["security_margin"]
    lines = manifest.header_lines() + [
        "",
        f"Value-Flow Graph Metrics ({metrics['snapshot_date']})",
        "",
        f"nodes / edges          {metrics['node_count']} / {metrics['edge_count']}",
        f"uninflated TVL (all)   {render.sig4(metrics['uninflated_tvl_all'])}",
        f"staked total           {render.sig4(metrics['staked_total'])}",
        f"restaked total         {render.sig4(metrics['restaked_total'])}",
        f"restaked fraction      {render.sig4(margin['restaked_fraction'])}",
        f"finality threshold     {render.sig4(margin['finality_threshold'])}",
        f"security margin        {render.sig4(margin['margin'])}",
        f"at risk                {'yes' if margin['at_risk'] else 'no'}",
        "",
    ]
    bridged = metrics["bridged"]
    if bridged:
        lines.append(f"bridged token          {bridged['token_node']}")
        lines.append(f"total supply           {render.sig4(bridged['total_supply'])}")
        lines.append(f"bridged share          {render.sig4(bridged['bridged_share'])}")
        for chain, block in bridged["by_chain"].items():
            lines.append(
                f"  {chain:<12} {render.sig4(block['amount']):>12}  "
                f"of supply {render.sig4(block['share_of_supply'])}  "
                f"of bridged {render.sig4(block['share_of_bridged'])}"
            )
        lines.append("")
    return {
        "graph_metrics.txt": "\n".join(lines),
        "graph_metrics.json": render.json_text(
            {"manifest": manifest.to_dict(), "metrics": metrics}
        ),
    }


def cmd_graph_paths(args) -> dict[str, str]:
    graph = load_graph(args.fixture, allow_stale=args.allow_stale)
    paths = exposure_paths(graph, args.source, args.sink, args.max_depth)
    manifest = RunManifest.build("graph paths", [], {"global": args.seed})
    return {
        "paths.json": render.json_text(
            {
                "manifest": manifest.to_dict(),
                "source": args.source,
                "sink": args.sink,
                "paths": [
                    {
                        "nodes": list(p.node_ids),
                        "bottleneck": p.bottleneck,
                        "edges": [
                            {
                                "from": e.source,
                                "to": e.target,
                                "kind": e.kind.value,
                                "amount": e.amount,
                            }
                            for e in p.edges
                        ],
                    }
                    for p in paths
                ],
            }
        )
    }


def cmd_report(args) -> dict[str, str]:
    panel, frame = _load_frame(args)
    manifest = RunManifest.build("report", [args.input], {"global": args.seed})

    fits = ops.regress_models(frame, (1, 2, 3))
    robust = ops.regress_models(frame, (1, 2, 3), robust=True)
    vif_values = vif(frame.design)
    adf_results = ops.adf_all(frame)
    granger_results = ops.granger_all(frame, max_lag=args.max_lag)
    chow_result = ops.chow_break(frame)
    config = ForestConfig(n_trees=args.trees, seed=args.seed)
    importance = ops.forest_importance(frame, config, repeats=args.repeats)

    files = {
        "regression.txt": render.regression_table(fits, "Regression Results", manifest),
        "robustness.txt": render.regression_table(
            robust, "Robustness Check (winsorized, HC3)", manifest
        ),
        "vif.txt": render.vif_table(vif_values, manifest),
        "adf.txt": render.test_table(adf_results, "Unit-Root Tests", manifest),
        "granger.txt": render.test_table(
            granger_results, "Predictive Precedence (min-p lag per variable)", manifest
        ),
        "chow.txt": render.test_table(
            [(f"break {ops.BREAK_DATE.isoformat()}", chow_result)],
            "Structural Break Test",
            manifest,
        ),
        "importance.txt": render.importance_table(importance, manifest),
        "summary_raw.txt": render.summary_table(
            panel_summary(panel), "Raw Panel Summary", manifest
        ),
        "summary_features.txt": render.summary_table(
            frame_summary(frame), "Engineered Panel Summary", manifest
        ),
        "report.json": render.json_text(
            {
                "manifest": manifest.to_dict(),
                "fits": ops.model_tables_payload(fits),
                "robust_fits": ops.model_tables_payload(robust),
                "vif": vif_values,
                "adf": {k: r.to_dict() for k, r in adf_results},
                "granger_selected": {k: r.to_dict() for k, r in granger_results},
                "chow": chow_result.to_dict(),
                "importance": importance.to_dict(),
            }
        ),
    }

    events = tuple(EVENT_DATES)
    files["fig_tvl.svg"] = timeseries_svg(
        panel.dates,
        [Series("protocol TVL (USD)", tuple(panel.column("tvl1")))],
        "Protocol TVL Over Time",
        event_dates=events,
    )
    files["fig_revenue.svg"] = timeseries_svg(
        panel.dates,
        [Series("revenue (USD)", tuple(panel.column("revenue")))],
        "Protocol Revenue Over Time",
        event_dates=events,
    )
    files["fig_prices.svg"] = timeseries_svg(
        panel.dates,
        [
            Series("ETH price", tuple(panel.column("eth_price"))),
            Series("LRT price", tuple(panel.column("ezeth_price"))),
        ],
        "Reference Prices Over Time",
    )
    model1 = fits["Model 1"]
    files["fig_residuals.svg"] = timeseries_svg(
        frame.design.dates,
        [Series("residual", tuple(model1.residuals))],
        "Baseline Regression Residuals Over Time",
    )

    taxonomy_path = fixtures_dir() / "protocol_taxonomy.json"
    if taxonomy_path.is_file():
        files["taxonomy.json"] = taxonomy_path.read_text(encoding="utf-8")
    return files


def cmd_serve(args) -> dict[str, str]:
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.partition(":")
    graph = load_graph(args.graph, allow_stale=args.allow_stale)
    defaults = ScenarioConfig.from_file(args.scenario)
    app = create_app(graph, defaults, ui_dir=args.ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")
    return {}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        files = args.func(args)
    except RestakelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if files:
        written = render.write_artifacts(args.out, files)
        for path in written:
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
