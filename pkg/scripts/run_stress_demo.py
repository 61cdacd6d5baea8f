#!/usr/bin/env python3
"""Run the bundled lending-market stress scenario and print the cascade.

Demonstrates the engine API end to end: load the graph snapshot, run the
scenario at its configured depeg, then sweep the depeg grid to find where
positions tip into liquidation.
"""

from __future__ import annotations

from restakelab._paths import scenarios_dir
from restakelab.flowgraph import graph_metrics, load_graph
from restakelab.stress import ScenarioConfig, run_scenario, sweep_depeg


def main():
    graph = load_graph("fig5_2025-10-04")
    config = ScenarioConfig.from_file(scenarios_dir() / "paper_linea_2025-10-04.json")

    metrics = graph_metrics(graph)
    margin = metrics["security_margin"]
    print(f"graph snapshot {metrics['snapshot_date']}: "
          f"{metrics['node_count']} nodes / {metrics['edge_count']} edges")
    print(f"staked {metrics['staked_total']:,.0f} ETH, "
          f"restaked {metrics['restaked_total']:,.0f} ETH-eq "
          f"({margin['restaked_fraction']:.1%} of stake, "
          f"at_risk={margin['at_risk']})")
    print()

    result = run_scenario(graph, config)
    print(f"depeg {config.depeg:.2%}  ->  health factor {result.health_factor:.4f} "
          f"({'liquidatable' if result.liquidatable else 'safe'})")
    print(f"critical depeg {result.critical_depeg:.4%}")
    print(f"coverage: local {result.local_coverage:.4%}, "
          f"mainnet {result.mainnet_coverage:.4%}, "
          f"LSP unwind {result.lsp_unwind:.4%}")
    print()
    print(f"{'stage':<16}{'inflow':>12}{'absorbed':>12}{'residual':>12}")
    for s in result.stages:
        print(f"{s.stage:<16}{s.inflow:>12,.0f}{s.absorbed:>12,.0f}{s.residual:>12,.0f}")
    print()

    grid = [i / 200 for i in range(0, 17)]
    print("depeg sweep (HF curve):")
    for delta, point in sweep_depeg(config, grid, graph=graph):
        flag = "LIQ" if point.liquidatable else "   "
        print(f"  {delta:6.2%}  HF={point.health_factor:.4f}  {flag}")


if __name__ == "__main__":
    main()
