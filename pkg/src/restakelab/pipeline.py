"""Data ingestion, daily-panel alignment and feature engineering.

Remote sources (REST JSON endpoints and subgraph-style GraphQL queries) are
fetched with bounded retries and cached to content-addressed flat files, so
every run after the first can execute fully offline.  Local CSV sources
never touch the network.  The feature step turns the aligned raw panel into
the regression design: log levels for the value-locked and revenue series,
log-return differences for the price-like series, a 7-day rolling return
volatility for fees, a percent price deviation, a supply share, an index
first-difference, and the tokenization-event dummy.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._paths import default_cache_dir, repo_root
from .econometrics.design import DesignMatrix
from .errors import AlignmentError, CacheMissError, IngestError, TransformError

#: tokenization announcement and token-generation days flagged by the dummy
EVENT_DATES = (
    dt.date(2024, 4, 26),
    dt.date(2024, 4, 29),
    dt.date(2024, 4, 30),
    dt.date(2024, 10, 1),
)

#: raw panel columns required by the feature step
RAW_COLUMNS = (
    "revenue",
    "tvl0",
    "tvl1",
    "tvl2",
    "yield",
    "ezeth_price",
    "eth_price",
    "ezeth_supply",
    "lrp_supply",
    "steth_apy",
    "tx_fee",
    "fgi",
)

#: engineered regressors in model order (response is Revenue)
FEATURE_COLUMNS = (
    "TVL0",
    "TVL1",
    "TVL2",
    "Yield",
    "Premium",
    "Share",
    "APY",
    "Events",
    "ETH",
    "TxFee",
    "FGI",
)

ROLLING_WINDOW = 7
WARMUP_ROWS = 7  # longest transform: 7 fee returns -> needs 7 prior days


class Transport(str, enum.Enum):
    GRAPH_QUERY = "GraphQuery"
    REST_JSON = "RestJson"
    LOCAL_CSV = "LocalCsv"


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    transport: Transport
    endpoint_or_path: str
    series_name: str
    cache_key: str = ""
    query_or_params: dict | str | None = None
    record_path: str = ""  # dot path to the record list in the response
    date_field: str = "date"
    value_field: str = "value"
    date_format: str = "iso"  # "iso" or "unix"
    units: str = ""

    def __post_init__(self):
        if not isinstance(self.transport, Transport):
            object.__setattr__(self, "transport", Transport(self.transport))
        if not self.cache_key:
            object.__setattr__(self, "cache_key", f"{self.source_id}:{self.series_name}")

    @classmethod
    def from_dict(cls, doc: dict) -> "SourceDescriptor":
        try:
            return cls(
                source_id=doc["source_id"],
                transport=Transport(doc["transport"]),
                endpoint_or_path=doc["endpoint_or_path"],
                series_name=doc["series_name"],
                cache_key=doc.get("cache_key", ""),
                query_or_params=doc.get("query_or_params"),
                record_path=doc.get("record_path", ""),
                date_field=doc.get("date_field", "date"),
                value_field=doc.get("value_field", "value"),
                date_format=doc.get("date_format", "iso"),
                units=doc.get("units", ""),
            )
        except KeyError as exc:
            raise IngestError(f"source descriptor missing field {exc.args[0]!r}") from None
        except ValueError as exc:
            raise IngestError(f"source descriptor malformed: {exc}") from None


@dataclass(frozen=True)
class RawSeries:
    series_name: str
    points: dict[dt.date, float]
    units: str = ""
    retrieved_at: str = ""

    def __post_init__(self):
        for day, value in self.points.items():
            if not math.isfinite(value):
                raise IngestError(f"series {self.series_name!r}: non-finite value on {day}")

    def to_dict(self) -> dict:
        return {
            "series_name": self.series_name,
            "units": self.units,
            "retrieved_at": self.retrieved_at,
            "points": {day.isoformat(): value for day, value in sorted(self.points.items())},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RawSeries":
        try:
            points = {
                dt.date.fromisoformat(day): float(value)
                for day, value in doc["points"].items()
            }
            return cls(
                series_name=doc["series_name"],
                points=points,
                units=doc.get("units", ""),
                retrieved_at=doc.get("retrieved_at", ""),
            )
        except (KeyError, ValueError) as exc:
            raise IngestError(f"malformed series document: {exc}") from None


# -- cache -------------------------------------------------------------------


class SeriesCache:
    """Content-addressed flat-file cache with a manifest; no implicit expiry."""

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def _manifest(self) -> dict:
        try:
            return json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return {}

    def get(self, cache_key: str) -> RawSeries | None:
        entry = self._manifest().get(cache_key)
        if entry is None:
            return None
        path = self.root / entry["file"]
        try:
            return RawSeries.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except FileNotFoundError:
            return None

    def put(self, cache_key: str, series: RawSeries):
        self.root.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(series.to_dict(), indent=2, sort_keys=True)
        digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        filename = f"{digest}.json"
        _atomic_write(self.root / filename, payload)
        manifest = self._manifest()
        manifest[cache_key] = {
            "file": filename,
            "sha256": digest,
            "retrieved_at": series.retrieved_at,
        }
        _atomic_write(self.manifest_path, json.dumps(manifest, indent=2, sort_keys=True))


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# -- fetching ----------------------------------------------------------------


def _resolve_path(raw: str) -> Path:
    path = Path(raw)
    if not path.is_absolute() and not path.exists():
        candidate = repo_root() / raw
        if candidate.exists():
            return candidate
    return path


def _read_two_column_csv(path: Path, series_name: str, value_column: str | None = None):
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or len(reader.fieldnames) < 2:
                raise IngestError(f"{path}: need a header with a date column and a value column")
            date_col = reader.fieldnames[0]
            value_col = value_column or (
                series_name if series_name in reader.fieldnames else reader.fieldnames[1]
            )
            points: dict[dt.date, float] = {}
            for row in reader:
                try:
                    day = dt.date.fromisoformat(row[date_col].strip())
                    value = float(row[value_col])
                except (KeyError, ValueError) as exc:
                    raise IngestError(f"{path}: bad row {row}: {exc}") from None
                if day in points:
                    raise AlignmentError(f"{path}: duplicate date {day}")
                points[day] = value
            return points
    except FileNotFoundError:
        raise IngestError(f"csv source not found: {path}") from None


def _dig(doc, dotted: str):
    node = doc
    if not dotted:
        return node
    for part in dotted.split("."):
        if isinstance(node, list):
            try:
                node = node[int(part)]
            except (ValueError, IndexError):
                raise IngestError(f"response path {dotted!r}: bad list index {part!r}") from None
        elif isinstance(node, dict):
            if part not in node:
                raise IngestError(f"response path {dotted!r}: missing key {part!r}")
            node = node[part]
        else:
            raise IngestError(f"response path {dotted!r}: hit a leaf at {part!r}")
    return node


def _parse_records(desc: SourceDescriptor, doc) -> dict[dt.date, float]:
    records = _dig(doc, desc.record_path)
    if not isinstance(records, list):
        raise IngestError(
            f"source {desc.source_id!r}: expected a record list at "
            f"{desc.record_path!r}, got {type(records).__name__}"
        )
    points: dict[dt.date, float] = {}
    for record in records:
        if not isinstance(record, dict):
            raise IngestError(f"source {desc.source_id!r}: record is not an object")
        try:
            raw_date = record[desc.date_field]
            raw_value = record[desc.value_field]
        except KeyError as exc:
            raise IngestError(
                f"source {desc.source_id!r}: record missing field {exc.args[0]!r}"
            ) from None
        try:
            if desc.date_format == "unix":
                day = dt.datetime.fromtimestamp(int(raw_date), dt.timezone.utc).date()
            else:
                day = dt.date.fromisoformat(str(raw_date)[:10])
            value = float(raw_value)
        except (ValueError, OverflowError) as exc:
            raise IngestError(f"source {desc.source_id!r}: bad record {record}: {exc}") from None
        if day in points:
            raise AlignmentError(f"source {desc.source_id!r}: duplicate date {day}")
        points[day] = value
    return points


def _http_fetch(desc: SourceDescriptor, retries: int, backoff_base: float):
    import requests

    last_error: Exception | None = None
    for attempt in range(retries):
        try:
            if desc.transport is Transport.GRAPH_QUERY:
                body = {"query": desc.query_or_params or ""}
                resp = requests.post(desc.endpoint_or_path, json=body, timeout=30)
            else:
                params = desc.query_or_params if isinstance(desc.query_or_params, dict) else None
                resp = requests.get(desc.endpoint_or_path, params=params, timeout=30)
            resp.raise_for_status()
            return resp.json()
        except (requests.RequestException, ValueError) as exc:
            last_error = exc
            if attempt < retries - 1 and backoff_base > 0:
                time.sleep(backoff_base * 2**attempt)
    raise IngestError(
        f"source {desc.source_id!r}: fetch failed after {retries} attempts: {last_error}"
    )


def fetch_series(
    desc: SourceDescriptor,
    offline: bool = False,
    cache: SeriesCache | None = None,
    retries: int = 3,
    backoff_base: float = 0.5,
) -> RawSeries:
    """Fetch one series through its transport, honoring the offline switch.

    Remote responses are cached under the descriptor's cache key; offline
    mode only reads the cache (or the local file for CSV sources) and fails
    with a cache miss otherwise.
    """
    if desc.transport is Transport.LOCAL_CSV:
        path = _resolve_path(desc.endpoint_or_path)
        points = _read_two_column_csv(path, desc.series_name)
        return RawSeries(series_name=desc.series_name, points=points, units=desc.units)

    cache = cache or SeriesCache()
    if offline:
        cached = cache.get(desc.cache_key)
        if cached is None:
            raise CacheMissError(
                f"offline mode: no cached copy for {desc.cache_key!r} "
                f"(run an online ingest first)"
            )
        return cached

    doc = _http_fetch(desc, retries=retries, backoff_base=backoff_base)
    points = _parse_records(desc, doc)
    series = RawSeries(
        series_name=desc.series_name,
        points=points,
        units=desc.units,
        retrieved_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    )
    cache.put(desc.cache_key, series)
    return series


# -- alignment ---------------------------------------------------------------


@dataclass(frozen=True)
class Panel:
    """Strictly daily raw panel: one row per day, one column per series."""

    dates: tuple[dt.date, ...]
    columns: dict[str, np.ndarray]
    fill_counts: dict[str, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.dates)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise AlignmentError(f"panel has no column {name!r}") from None


def align_daily(
    series: list[RawSeries],
    start: dt.date,
    end: dt.date,
    ffill: bool = False,
) -> Panel:
    """Build the daily panel over [start, end].

    Any missing day fails by default, naming the series and the date; with
    `ffill` gaps are forward-filled and counted per series.  A missing first
    day can never be filled.
    """
    if end < start:
        raise AlignmentError(f"end {end} before start {start}")
    names = [s.series_name for s in series]
    if len(set(names)) != len(names):
        raise AlignmentError(f"duplicate series names in panel: {sorted(names)}")
    days = tuple(
        start + dt.timedelta(days=i) for i in range((end - start).days + 1)
    )
    columns: dict[str, np.ndarray] = {}
    fill_counts: dict[str, int] = {}
    for s in sorted(series, key=lambda s: s.series_name):
        values = np.empty(len(days))
        filled = 0
        last = None
        for i, day in enumerate(days):
            if day in s.points:
                last = s.points[day]
            elif ffill and last is not None:
                filled += 1
            else:
                raise AlignmentError(
                    f"series {s.series_name!r}: missing value on {day}"
                    + ("" if ffill else " (pass ffill to forward-fill)")
                )
            values[i] = last
        columns[s.series_name] = values
        fill_counts[s.series_name] = filled
    return Panel(dates=days, columns=columns, fill_counts=fill_counts)


def read_panel_csv(path: str | Path, ffill: bool = False) -> Panel:
    """Load a panel from a wide CSV (ISO date first, one column per series)."""
    path = _resolve_path(str(path))
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or len(reader.fieldnames) < 2:
                raise IngestError(f"{path}: need a date column plus at least one series")
            date_col = reader.fieldnames[0]
            names = reader.fieldnames[1:]
            points: dict[str, dict[dt.date, float]] = {n: {} for n in names}
            days: list[dt.date] = []
            seen: set[dt.date] = set()
            for row in reader:
                try:
                    day = dt.date.fromisoformat(row[date_col].strip())
                except ValueError as exc:
                    raise IngestError(f"{path}: bad date {row[date_col]!r}: {exc}") from None
                if day in seen:
                    raise AlignmentError(f"{path}: duplicate date {day}")
                seen.add(day)
                days.append(day)
                for name in names:
                    cell = row[name]
                    if cell is None or cell == "":
                        continue  # gap; alignment policy decides
                    try:
                        points[name][day] = float(cell)
                    except ValueError as exc:
                        raise IngestError(
                            f"{path}: bad value {cell!r} for {name} on {day}: {exc}"
                        ) from None
    except FileNotFoundError:
        raise IngestError(f"panel csv not found: {path}") from None
    if not days:
        raise IngestError(f"{path}: empty panel")
    series = [RawSeries(series_name=n, points=points[n]) for n in names]
    return align_daily(series, min(days), max(days), ffill=ffill)


# -- feature engineering -------------------------------------------------------


@dataclass(frozen=True)
class FeatureFrame:
    """Engineered design plus the provenance of every transform applied."""

    design: DesignMatrix
    provenance: dict[str, tuple[str, ...]]
    warmup_dropped: int
    fill_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "dates": [d.isoformat() for d in self.design.dates],
            "response": {"name": self.design.y_name, "values": self.design.y.tolist()},
            "columns": {k: v.tolist() for k, v in self.design.columns.items()},
            "provenance": {k: list(v) for k, v in self.provenance.items()},
            "warmup_dropped": self.warmup_dropped,
            "fill_counts": self.fill_counts,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureFrame":
        design = DesignMatrix(
            dates=tuple(dt.date.fromisoformat(d) for d in doc["dates"]),
            y=np.asarray(doc["response"]["values"], dtype=float),
            columns={k: np.asarray(v, dtype=float) for k, v in doc["columns"].items()},
            y_name=doc["response"]["name"],
        )
        return cls(
            design=design,
            provenance={k: tuple(v) for k, v in doc["provenance"].items()},
            warmup_dropped=int(doc["warmup_dropped"]),
            fill_counts={k: int(v) for k, v in doc.get("fill_counts", {}).items()},
        )


def _safe_log(values: np.ndarray, dates, column: str) -> np.ndarray:
    bad = np.flatnonzero(values <= 0.0)
    if bad.size:
        raise TransformError(
            f"column {column!r}: log transform needs positive values, "
            f"got {values[bad[0]]} on {dates[bad[0]]}"
        )
    return np.log(values)


def _rolling_std(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing sample standard deviation including the current observation."""
    if values.size < window:
        raise TransformError(
            f"rolling window {window} longer than series of length {values.size}"
        )
    windows = np.lib.stride_tricks.sliding_window_view(values, window)
    return windows.std(axis=1, ddof=1)


def engineer_features(panel: Panel) -> FeatureFrame:
    """Apply the model transform chain to the raw panel.

    The first WARMUP_ROWS days feed the differencing and rolling windows and
    are dropped from the output, so a panel starting 7 days before the study
    window produces exactly the study window.
    """
    missing = [c for c in RAW_COLUMNS if c not in panel.columns]
    if missing:
        raise TransformError(f"panel is missing raw columns: {missing}")
    if panel.n <= WARMUP_ROWS:
        raise TransformError(
            f"panel has {panel.n} rows; need more than the {WARMUP_ROWS} warm-up rows"
        )
    dates = panel.dates
    n = panel.n

    log_revenue = _safe_log(panel.column("revenue"), dates, "revenue")
    log_tvl0 = _safe_log(panel.column("tvl0"), dates, "tvl0")
    log_tvl1 = _safe_log(panel.column("tvl1"), dates, "tvl1")
    log_tvl2 = _safe_log(panel.column("tvl2"), dates, "tvl2")
    log_eth = _safe_log(panel.column("eth_price"), dates, "eth_price")
    log_fee = _safe_log(panel.column("tx_fee"), dates, "tx_fee")

    eth_price = panel.column("eth_price")
    premium = 100.0 * (panel.column("ezeth_price") / eth_price - 1.0)
    lrp_supply = panel.column("lrp_supply")
    if np.any(lrp_supply <= 0):
        raise TransformError("column 'lrp_supply': supply share needs positive totals")
    share = 100.0 * panel.column("ezeth_supply") / lrp_supply
    events = np.array([1.0 if d in EVENT_DATES else 0.0 for d in dates])

    # warm-up geometry: diffs lose 1 leading row, the fee-volatility window
    # needs ROLLING_WINDOW returns, i.e. ROLLING_WINDOW prior price days
    tvl1_diff = np.diff(log_tvl1)  # length n-1, aligned to dates[1:]
    eth_ret = np.diff(log_eth)
    fgi_diff = np.diff(panel.column("fgi"))
    fee_vol = _rolling_std(np.diff(log_fee), ROLLING_WINDOW)  # aligned to dates[7:]

    keep = slice(WARMUP_ROWS, n)
    keep_diff = slice(WARMUP_ROWS - 1, n - 1)
    columns = {
        "TVL0": log_tvl0[keep],
        "TVL1": tvl1_diff[keep_diff],
        "TVL2": log_tvl2[keep],
        "Yield": panel.column("yield")[keep],
        "Premium": premium[keep],
        "Share": share[keep],
        "APY": panel.column("steth_apy")[keep],
        "Events": events[keep],
        "ETH": eth_ret[keep_diff],
        "TxFee": fee_vol,
        "FGI": fgi_diff[keep_diff],
    }
    design = DesignMatrix(
        dates=dates[keep],
        y=log_revenue[keep],
        columns=columns,
        y_name="Revenue",
    )
    provenance = {
        "Revenue": ("log",),
        "TVL0": ("log",),
        "TVL1": ("log", "diff"),
        "TVL2": ("log",),
        "Yield": ("raw",),
        "Premium": ("pct_dev",),
        "Share": ("supply_share",),
        "APY": ("raw",),
        "Events": ("dummy",),
        "ETH": ("log", "diff"),
        "TxFee": ("log", "diff", f"roll_std_{ROLLING_WINDOW}"),
        "FGI": ("diff",),
    }
    return FeatureFrame(
        design=design,
        provenance=provenance,
        warmup_dropped=WARMUP_ROWS,
        fill_counts=dict(panel.fill_counts),
    )


# -- summaries ----------------------------------------------------------------


def summary_stats(columns: dict[str, np.ndarray]) -> list[dict]:
    """Per-column mean / sample std / min / max, in column order."""
    if not columns:
        raise TransformError("summary statistics need at least one column")
    rows = []
    for name, values in columns.items():
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise TransformError(f"column {name!r} is empty")
        std = float(values.std(ddof=1)) if values.size > 1 else 0.0
        rows.append(
            {
                "column": name,
                "mean": float(values.mean()),
                "std": std,
                "min": float(values.min()),
                "max": float(values.max()),
            }
        )
    return rows


def panel_summary(panel: Panel) -> list[dict]:
    return summary_stats(panel.columns)


def frame_summary(frame: FeatureFrame) -> list[dict]:
    cols: dict[str, np.ndarray] = {frame.design.y_name: frame.design.y}
    cols.update(frame.design.columns)
    return summary_stats(cols)


def synthetic_panel() -> Panel:
    """The bundled deterministic fixture panel used by tests and CI runs."""
    return read_panel_csv(repo_root() / "fixtures" / "synthetic_panel.csv")
