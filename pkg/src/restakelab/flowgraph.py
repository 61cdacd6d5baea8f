"""Value-flow graph of staking, restaking, bridge and DeFi positions.

Nodes carry ETH-equivalent balances; edges describe how value moves between
them (staking, minting a receipt token, restaking, bridging, collateral
posting, LP provision).  An edge may declare `derivative_of`: the node whose
underlying units the edge's target re-represents.  Those links drive the
de-duplicated ("uninflated") TVL accounting: a receipt token, a bridged copy
or posted collateral is never counted on top of the balance it mirrors.

Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from ._paths import fixtures_dir
from .errors import GraphError, UndefinedRatioError

FINALITY_THRESHOLD = 1.0 / 3.0


class NodeKind(str, enum.Enum):
    BASE_ASSET = "BaseAsset"
    STAKING_POOL = "StakingPool"
    LIQUID_STAKING_PROTOCOL = "LiquidStakingProtocol"
    RESTAKING_INFRA = "RestakingInfra"
    LIQUID_RESTAKING_PROTOCOL = "LiquidRestakingProtocol"
    BRIDGE_CONTRACT = "BridgeContract"
    ROLLUP = "Rollup"
    LENDING_POOL = "LendingPool"
    DEX_POOL = "DexPool"
    YIELD_PROTOCOL = "YieldProtocol"


class EdgeKind(str, enum.Enum):
    STAKE = "Stake"
    MINT = "Mint"
    RESTAKE = "Restake"
    BRIDGE = "Bridge"
    WRAP = "Wrap"
    COLLATERALIZE = "Collateralize"
    PROVIDE_LIQUIDITY = "ProvideLiquidity"


#: edge kinds that re-represent locked value elsewhere and therefore must
#: declare what they re-represent
_DERIVATIVE_REQUIRED = frozenset({EdgeKind.BRIDGE, EdgeKind.WRAP})


class StaleSnapshotWarning(UserWarning):
    """Edge amount exceeds its origin balance; snapshot times likely differ."""


@dataclass(frozen=True)
class FlowNode:
    id: str
    kind: NodeKind
    chain: str
    balance: float

    def __post_init__(self):
        if not self.id:
            raise GraphError("node id must be non-empty")
        if not math.isfinite(self.balance) or self.balance < 0:
            raise GraphError(f"node {self.id!r}: balance must be finite and >= 0")


@dataclass(frozen=True)
class FlowEdge:
    source: str
    target: str
    kind: EdgeKind
    amount: float
    derivative_of: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.amount) or self.amount < 0:
            raise GraphError(
                f"edge {self.source!r}->{self.target!r}: amount must be finite and >= 0"
            )


@dataclass(frozen=True)
class FlowGraph:
    nodes: tuple[FlowNode, ...]
    edges: tuple[FlowEdge, ...]
    snapshot_date: str
    eth_usd_price: float | None = None

    def __post_init__(self):
        seen = set()
        for node in self.nodes:
            if node.id in seen:
                raise GraphError(f"duplicate node id {node.id!r}")
            seen.add(node.id)
        for edge in self.edges:
            for endpoint in (edge.source, edge.target):
                if endpoint not in seen:
                    raise GraphError(
                        f"edge {edge.source!r}->{edge.target!r}: unknown node {endpoint!r}"
                    )
            if edge.derivative_of is not None and edge.derivative_of not in seen:
                raise GraphError(
                    f"edge {edge.source!r}->{edge.target!r}: "
                    f"derivative_of references unknown node {edge.derivative_of!r}"
                )
            if edge.kind in _DERIVATIVE_REQUIRED and edge.derivative_of is None:
                raise GraphError(
                    f"edge {edge.source!r}->{edge.target!r}: "
                    f"{edge.kind.value} edges must declare derivative_of"
                )
        if self.eth_usd_price is not None and not self.eth_usd_price > 0:
            raise GraphError("eth_usd_price must be positive when given")
        self._check_derivative_acyclic()

    # -- derived structure ------------------------------------------------

    @cached_property
    def node_map(self) -> dict[str, FlowNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _adjacency(self) -> dict[str, tuple[FlowEdge, ...]]:
        adj: dict[str, list[FlowEdge]] = {n.id: [] for n in self.nodes}
        for edge in self.edges:
            adj[edge.source].append(edge)
        # canonical order makes traversal output independent of document order
        return {
            nid: tuple(sorted(out, key=lambda e: (e.target, e.kind.value, e.amount)))
            for nid, out in adj.items()
        }

    @cached_property
    def _derived_from(self) -> dict[str, frozenset[str]]:
        """Direct underlying nodes per node: target <- derivative_of."""
        rel: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        for edge in self.edges:
            if edge.derivative_of is not None and edge.derivative_of != edge.target:
                rel[edge.target].add(edge.derivative_of)
        return {nid: frozenset(s) for nid, s in rel.items()}

    def _check_derivative_acyclic(self):
        rel: dict[str, set[str]] = {}
        for edge in self.edges:
            if edge.derivative_of is not None:
                rel.setdefault(edge.target, set()).add(edge.derivative_of)
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(nid: str, trail: list[str]):
            state[nid] = 1
            for parent in rel.get(nid, ()):
                if state.get(parent) == 1:
                    cycle = trail + [nid, parent]
                    raise GraphError(f"derivative cycle: {' -> '.join(cycle)}")
                if state.get(parent) != 2:
                    visit(parent, trail + [nid])
            state[nid] = 2

        for nid in rel:
            if state.get(nid) != 2:
                visit(nid, [])

    def derivative_ancestors(self, node_id: str) -> frozenset[str]:
        """All nodes whose units `node_id`'s balance re-represents (transitive)."""
        out: set[str] = set()
        stack = list(self._derived_from[node_id])
        while stack:
            nid = stack.pop()
            if nid in out:
                continue
            out.add(nid)
            stack.extend(self._derived_from[nid])
        return frozenset(out)

    def nodes_of_kind(self, *kinds: NodeKind) -> tuple[FlowNode, ...]:
        wanted = set(kinds)
        return tuple(n for n in self.nodes if n.kind in wanted)

    def to_dict(self) -> dict:
        return {
            "snapshot_date": self.snapshot_date,
            "eth_usd_price": self.eth_usd_price,
            "nodes": [
                {"id": n.id, "kind": n.kind.value, "chain": n.chain, "balance": n.balance}
                for n in self.nodes
            ],
            "edges": [
                {
                    "from": e.source,
                    "to": e.target,
                    "kind": e.kind.value,
                    "amount": e.amount,
                    "derivative_of": e.derivative_of,
                }
                for e in self.edges
            ],
        }


# -- loading ---------------------------------------------------------------


def _parse_node(doc: dict) -> FlowNode:
    try:
        kind = NodeKind(doc["kind"])
    except ValueError:
        raise GraphError(f"unknown node kind {doc.get('kind')!r}") from None
    except KeyError:
        raise GraphError("node document missing 'kind'") from None
    try:
        return FlowNode(
            id=str(doc["id"]),
            kind=kind,
            chain=str(doc.get("chain", "ethereum")),
            balance=float(doc["balance"]),
        )
    except KeyError as exc:
        raise GraphError(f"node document missing {exc.args[0]!r}") from None


def _parse_edge(doc: dict) -> FlowEdge:
    try:
        kind = EdgeKind(doc["kind"])
    except ValueError:
        raise GraphError(f"unknown edge kind {doc.get('kind')!r}") from None
    except KeyError:
        raise GraphError("edge document missing 'kind'") from None
    try:
        return FlowEdge(
            source=str(doc["from"]),
            target=str(doc["to"]),
            kind=kind,
            amount=float(doc["amount"]),
            derivative_of=doc.get("derivative_of"),
        )
    except KeyError as exc:
        raise GraphError(f"edge document missing {exc.args[0]!r}") from None


def load_graph(source: str | Path | dict, allow_stale: bool = False) -> FlowGraph:
    """Load and validate a value-flow graph.

    `source` is a path to a JSON document, the bare name of a bundled
    fixture (e.g. ``fig5_2025-10-04``), or an already-parsed dict.
    Edge amounts larger than the origin node's balance are rejected unless
    `allow_stale` is set, in which case a StaleSnapshotWarning is emitted
    (snapshots composed from several sources rarely share one timestamp).
    """
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        if not path.suffix and not path.exists():
            path = fixtures_dir() / f"{path.name}.json"
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise GraphError(f"graph fixture not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise GraphError(f"malformed graph document {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")

    nodes = tuple(_parse_node(n) for n in doc.get("nodes", []))
    edges = tuple(_parse_edge(e) for e in doc.get("edges", []))
    graph = FlowGraph(
        nodes=nodes,
        edges=edges,
        snapshot_date=str(doc.get("snapshot_date", "")),
        eth_usd_price=doc.get("eth_usd_price"),
    )

    for edge in edges:
        origin = graph.node_map[edge.source]
        if edge.amount > origin.balance:
            msg = (
                f"edge {edge.source!r}->{edge.target!r}: amount {edge.amount} exceeds "
                f"origin balance {origin.balance}"
            )
            if allow_stale:
                warnings.warn(msg, StaleSnapshotWarning, stacklevel=2)
            else:
                raise GraphError(msg + " (pass allow_stale to accept)")
    return graph


# -- aggregates ------------------------------------------------------------


def uninflated_tvl(graph: FlowGraph, scope: set[str] | frozenset[str]) -> float:
    """De-duplicated ETH-equivalent total over `scope`.

    A node's balance is excluded when it re-represents (through any chain of
    derivative links) the units of another in-scope node, so every underlying
    unit is counted exactly once.
    """
    scope = set(scope)
    unknown = scope - graph.node_map.keys()
    if unknown:
        raise GraphError(f"scope contains unknown nodes: {sorted(unknown)}")
    total = 0.0
    for nid in sorted(scope):
        ancestors = graph.derivative_ancestors(nid)
        if ancestors & scope:
            continue
        total += graph.node_map[nid].balance
    return total


def bridged_share(
    graph: FlowGraph, token_node: str, destination_chain: str | None = None
) -> float:
    """Fraction of a token's supply held as bridged/wrapped representations.

    Supply is the home-chain balance plus everything bridged out.  With
    `destination_chain` the numerator is restricted to that chain; the
    denominator is always the full supply, so per-chain shares sum to the
    all-chains share.
    """
    if token_node not in graph.node_map:
        raise GraphError(f"unknown node {token_node!r}")
    home = graph.node_map[token_node].balance
    bridged_all = 0.0
    bridged_selected = 0.0
    for edge in graph._adjacency[token_node]:
        if edge.kind not in _DERIVATIVE_REQUIRED:
            continue
        bridged_all += edge.amount
        if destination_chain is None or graph.node_map[edge.target].chain == destination_chain:
            bridged_selected += edge.amount
    supply = home + bridged_all
    if supply == 0:
        raise UndefinedRatioError(f"token {token_node!r} has zero total supply")
    return bridged_selected / supply


@dataclass(frozen=True)
class SecurityMargin:
    restaked_fraction: float
    margin: float
    at_risk: bool
    finality_threshold: float = FINALITY_THRESHOLD


def network_security_margin(
    graph: FlowGraph | None,
    staked_total: float | None = None,
    restaked_total: float | None = None,
    finality_threshold: float = FINALITY_THRESHOLD,
) -> SecurityMargin:
    """Restaked share of staked ETH against the finality-attack threshold.

    Totals default to graph aggregates: staked = sum of staking-pool
    balances, restaked = uninflated total over restaking infrastructure,
    liquid-restaking protocols and their bridged representations.
    """
    if staked_total is None or restaked_total is None:
        if graph is None:
            raise GraphError("either a graph or explicit totals are required")
        if staked_total is None:
            staked_total = sum(n.balance for n in graph.nodes_of_kind(NodeKind.STAKING_POOL))
        if restaked_total is None:
            scope = {
                n.id
                for n in graph.nodes_of_kind(
                    NodeKind.RESTAKING_INFRA,
                    NodeKind.LIQUID_RESTAKING_PROTOCOL,
                    NodeKind.BRIDGE_CONTRACT,
                )
            }
            restaked_total = uninflated_tvl(graph, scope)
    if not staked_total > 0:
        raise GraphError("staked_total must be positive")
    if restaked_total < 0:
        raise GraphError("restaked_total must be non-negative")
    fraction = restaked_total / staked_total
    return SecurityMargin(
        restaked_fraction=fraction,
        margin=finality_threshold - fraction,
        at_risk=fraction >= finality_threshold,
        finality_threshold=finality_threshold,
    )


@dataclass(frozen=True)
class ExposurePath:
    """A simple source-to-sink route with its bottleneck (min edge amount)."""

    edges: tuple[FlowEdge, ...]
    bottleneck: float | None = field(default=None)

    @property
    def node_ids(self) -> tuple[str, ...]:
        if not self.edges:
            return ()
        return (self.edges[0].source,) + tuple(e.target for e in self.edges)


def exposure_paths(
    graph: FlowGraph, source: str, sink: str, max_depth: int
) -> list[ExposurePath]:
    """Enumerate simple paths source -> sink with at most `max_depth` edges.

    Ordering is lexicographic by the visited node-id sequence, independent of
    the edge order in the input document.
    """
    for nid in (source, sink):
        if nid not in graph.node_map:
            raise GraphError(f"unknown node {nid!r}")
    if max_depth < 1:
        raise GraphError("max_depth must be >= 1")
    if source == sink:
        return [ExposurePath(edges=(), bottleneck=None)]

    paths: list[ExposurePath] = []
    trail: list[FlowEdge] = []
    visited = {source}

    def walk(node: str):
        if len(trail) >= max_depth:
            return
        for edge in graph._adjacency[node]:
            if edge.target in visited:
                continue
            trail.append(edge)
            if edge.target == sink:
                paths.append(
                    ExposurePath(
                        edges=tuple(trail),
                        bottleneck=min(e.amount for e in trail),
                    )
                )
            else:
                visited.add(edge.target)
                walk(edge.target)
                visited.discard(edge.target)
            trail.pop()

    walk(source)
    return paths


def graph_metrics(graph: FlowGraph, token_node: str | None = None) -> dict:
    """Summary aggregates for reports and the HTTP service."""
    staked_total = sum(n.balance for n in graph.nodes_of_kind(NodeKind.STAKING_POOL))
    restake_scope = {
        n.id
        for n in graph.nodes_of_kind(
            NodeKind.RESTAKING_INFRA,
            NodeKind.LIQUID_RESTAKING_PROTOCOL,
            NodeKind.BRIDGE_CONTRACT,
        )
    }
    restaked_total = uninflated_tvl(graph, restake_scope)
    margin = network_security_margin(graph, staked_total, restaked_total)

    if token_node is None:
        lrps = graph.nodes_of_kind(NodeKind.LIQUID_RESTAKING_PROTOCOL)
        token_node = lrps[0].id if lrps else None

    token_block = None
    if token_node is not None:
        home = graph.node_map[token_node].balance
        by_chain: dict[str, float] = {}
        for edge in graph._adjacency[token_node]:
            if edge.kind in _DERIVATIVE_REQUIRED:
                chain = graph.node_map[edge.target].chain
                by_chain[chain] = by_chain.get(chain, 0.0) + edge.amount
        bridged_total = sum(by_chain.values())
        supply = home + bridged_total
        token_block = {
            "token_node": token_node,
            "home_balance": home,
            "bridged_total": bridged_total,
            "total_supply": supply,
            "bridged_share": bridged_share(graph, token_node) if supply else None,
            "by_chain": {
                chain: {
                    "amount": amount,
                    "share_of_supply": amount / supply if supply else None,
                    "share_of_bridged": amount / bridged_total if bridged_total else None,
                }
                for chain, amount in sorted(by_chain.items())
            },
        }

    return {
        "snapshot_date": graph.snapshot_date,
        "eth_usd_price": graph.eth_usd_price,
        "node_count": len(graph.nodes),
        "edge_count": len(graph.edges),
        "uninflated_tvl_all": uninflated_tvl(graph, {n.id for n in graph.nodes}),
        "staked_total": staked_total,
        "restaked_total": restaked_total,
        "security_margin": {
            "restaked_fraction": margin.restaked_fraction,
            "margin": margin.margin,
            "at_risk": margin.at_risk,
            "finality_threshold": margin.finality_threshold,
        },
        "bridged": token_block,
    }
