"""Experiment harness: presets, dataset resolution, CSV emission, manifests.

Every run directory gets a manifest.txt holding the effective config plus
run metadata under the reserved `run.` namespace. Manifests are themselves
valid configs, so a finished run can be repeated with --config manifest.txt;
all data columns are emitted deterministically (timing columns and manifest
timestamps are the only thing that varies between identical runs).

Preset hyperparameters (client counts, rates, round budgets) are desk-scale
defaults chosen for this simulator, not published values; manifests carry a
note saying so.
"""

from __future__ import annotations

import csv
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, Value, as_list, format_config, get_typed
from .costs import (
    DEFAULT_PRICE_SHEET,
    CentralScenario,
    CostBreakdown,
    FlScenario,
    PriceSheet,
    SweepRow,
    fl_deployment_cost,
    fl_training_cost,
    central_cost,
    sweep,
)
from .data import (
    IID,
    SINGLE_LABEL,
    SINGLE_SAMPLE,
    Dataset,
    PartitionPlan,
    load_idx,
    partition,
    synth_dataset,
)
from .federation import FedConfig, RoundMetrics, train_centralized, train_federated
from .nn import MlpSpec, ServerOptimizerState
from .rng import derive_seed

ENV_DATA_DIR = "FEDSIM_DATA_DIR"

CUSTOM = "custom"
SAMPLES_SWEEP = "samples_sweep"
SINGLE_LABEL_SWEEP = "single_label_sweep"
ROUND_CURVES = "round_curves"
CENTRAL_BASELINE = "central_baseline"
COST_MODEL_SIZE_SWEEP = "cost_model_size_sweep"
COST_ROUNDS_SWEEP = "cost_rounds_sweep"
COST_ROUNDS_PER_DAY_SWEEP = "cost_rounds_per_day_sweep"

EXPERIMENTS = (
    CUSTOM,
    SAMPLES_SWEEP,
    SINGLE_LABEL_SWEEP,
    ROUND_CURVES,
    CENTRAL_BASELINE,
    COST_MODEL_SIZE_SWEEP,
    COST_ROUNDS_SWEEP,
    COST_ROUNDS_PER_DAY_SWEEP,
)

MNIST_FILES = {
    "data.train_images": "train-images-idx3-ubyte.gz",
    "data.train_labels": "train-labels-idx1-ubyte.gz",
    "data.test_images": "t10k-images-idx3-ubyte.gz",
    "data.test_labels": "t10k-labels-idx1-ubyte.gz",
}

_FED_PRESET_COMMON: dict[str, Value] = {
    "data.source": "mnist",
    "partition.kind": IID,
    "fed.num_clients": 100,
    "fed.client_fraction": 0.1,
    "fed.local_epochs": 5,
    "fed.batch_size": 10,
    "fed.client_lr": 0.1,
    "fed.rounds": 100,
    "fed.update_mode": "send_weights",
    "fed.eval_every": 10,
    "server.kind": "sgd",
    "server.lr": 1.0,
}

PRESETS: dict[str, dict[str, Value]] = {
    CUSTOM: {},
    SAMPLES_SWEEP: {
        **_FED_PRESET_COMMON,
        "preset.arch.0": [784, 10],
        "preset.arch.1": [784, 200, 10],
        "preset.arch.2": [784, 500, 200, 10],
        "preset.samples_per_client": [1, 10, 50, 100, 200],
    },
    SINGLE_LABEL_SWEEP: {
        **_FED_PRESET_COMMON,
        "partition.kind": SINGLE_LABEL,
        "model.layers": [784, 500, 200, 10],
        "preset.samples_per_client": [10, 50, 100, 200],
    },
    ROUND_CURVES: {
        **_FED_PRESET_COMMON,
        "partition.kind": SINGLE_LABEL,
        "fed.rounds": 300,
        "model.layers": [784, 500, 200, 10],
        "preset.samples_per_client": [1, 10, 200],
    },
    CENTRAL_BASELINE: {
        "data.source": "mnist",
        "central.lr": 0.1,
        "central.batch_size": 32,
        "central.epochs": 5,
        "preset.arch.0": [784, 10],
        "preset.arch.1": [784, 200, 10],
        "preset.arch.2": [784, 500, 200, 10],
    },
    COST_MODEL_SIZE_SWEEP: {
        "cost.rounds": 200,
        "cost.rounds_per_day": 100,
        "cost.sweep.dimension": "model_size",
        "cost.sweep.values": [15_000, 500_000, 1_000_000, 15_000_000],
        "cost.model_size_bytes": 500_000,
    },
    COST_ROUNDS_SWEEP: {
        "cost.rounds": 3000,
        "cost.rounds_per_day": 200,
        "cost.sweep.dimension": "rounds",
        "cost.sweep.values": [200, 500, 1000, 2000, 3000, 5000],
        "cost.model_size_bytes": 500_000,
    },
    COST_ROUNDS_PER_DAY_SWEEP: {
        "cost.rounds": 3000,
        "cost.rounds_per_day": 200,
        "cost.sweep.dimension": "rounds_per_day",
        "cost.sweep.values": [25, 50, 100, 200, 400],
        "cost.model_size_bytes": 500_000,
    },
}

KNOWN_KEYS = {
    "experiment",
    "seed",
    "data.source",
    "data.dir",
    "data.train_images",
    "data.train_labels",
    "data.test_images",
    "data.test_labels",
    "data.num_classes",
    "data.features",
    "data.train_samples",
    "data.test_samples",
    "model.layers",
    "model.activation",
    "partition.kind",
    "partition.samples_per_client",
    "fed.num_clients",
    "fed.client_fraction",
    "fed.local_epochs",
    "fed.batch_size",
    "fed.client_lr",
    "fed.rounds",
    "fed.update_mode",
    "fed.eval_every",
    "fed.alg1_literal_normalization",
    "server.kind",
    "server.lr",
    "server.beta1",
    "server.beta2",
    "server.eps",
    "server.rho",
    "central.lr",
    "central.batch_size",
    "central.epochs",
    "cost.scenario",
    "cost.model_size_bytes",
    "cost.rounds",
    "cost.rounds_per_day",
    "cost.population",
    "cost.registered",
    "cost.cohort",
    "cost.plan_size_bytes",
    "cost.msg_size_bytes",
    "cost.month_hours",
    "cost.sync_bytes_per_device_month",
    "cost.label_bytes_back",
    "cost.sync_events_per_device_month",
    "cost.ingestion_count",
    "cost.ingestion_days",
    "cost.training_count",
    "cost.training_days",
    "cost.tagging_count",
    "cost.tagging_days",
    "cost.sweep.dimension",
    "cost.sweep.values",
    "preset.samples_per_client",
    "price.zero",
}
KNOWN_PREFIXES = ("run.", "price.", "preset.arch.")


def validate_keys(cfg: dict[str, Value]) -> None:
    for key in cfg:
        if key in KNOWN_KEYS or any(key.startswith(p) for p in KNOWN_PREFIXES):
            continue
        raise ConfigError("unknown config key", key=key)


def effective_config(cfg: dict[str, Value]) -> dict[str, Value]:
    """Overlay the user config on its experiment preset's defaults."""
    experiment = cfg.get("experiment", CUSTOM)
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}, pick one of {EXPERIMENTS}", key="experiment")
    merged = {**PRESETS[experiment], **cfg}
    merged["experiment"] = experiment
    validate_keys(merged)
    return merged


# ---------------------------------------------------------------- datasets

def _resolve_idx_path(directory: Path, name: str, key: str) -> Path:
    """Accept the configured name, with or without a .gz twist."""
    candidates = [directory / name]
    if name.endswith(".gz"):
        candidates.append(directory / name[: -len(".gz")])
    else:
        candidates.append(directory / (name + ".gz"))
    for c in candidates:
        if c.exists():
            return c
    raise FileNotFoundError(f"{key}: none of {[str(c) for c in candidates]} exist")


def resolve_datasets(cfg: dict[str, Value]) -> tuple[Dataset, Dataset | None]:
    """Build (train, test) datasets from the data.* config section."""
    source = get_typed(cfg, "data.source", str, "synth")
    if source == "synth":
        seed = get_typed(cfg, "seed", int)
        classes = get_typed(cfg, "data.num_classes", int, 10)
        features = get_typed(cfg, "data.features", int, 20)
        n_train = get_typed(cfg, "data.train_samples", int, 2000)
        n_test = get_typed(cfg, "data.test_samples", int, 1000)
        train = synth_dataset(classes, features, n_train, derive_seed(seed, "synth-train"))
        test = synth_dataset(classes, features, n_test, derive_seed(seed, "synth-test")) if n_test > 0 else None
        return train, test
    if source == "mnist":
        directory = Path(os.environ.get(ENV_DATA_DIR) or get_typed(cfg, "data.dir", str, "data"))
        paths = {
            key: _resolve_idx_path(directory, get_typed(cfg, key, str, default_name), key)
            for key, default_name in MNIST_FILES.items()
        }
        train = load_idx(paths["data.train_images"], paths["data.train_labels"])
        test = load_idx(paths["data.test_images"], paths["data.test_labels"])
        return train, test
    raise ConfigError(f"unknown data source {source!r}", key="data.source")


def build_model(cfg: dict[str, Value], layers: list[int] | None = None) -> MlpSpec:
    if layers is None:
        value = cfg.get("model.layers")
        if value is None:
            raise ConfigError("required key missing", key="model.layers")
        layers = [int(v) for v in (value if isinstance(value, list) else [value])]
    activation = get_typed(cfg, "model.activation", str, "relu")
    return MlpSpec(tuple(layers), activation)


def build_plan(cfg: dict[str, Value], samples_per_client: int | None = None) -> PartitionPlan:
    kind = get_typed(cfg, "partition.kind", str, IID)
    if samples_per_client is None:
        samples_per_client = get_typed(cfg, "partition.samples_per_client", int)
    return PartitionPlan(
        kind=kind,
        num_clients=get_typed(cfg, "fed.num_clients", int),
        samples_per_client=samples_per_client,
        seed=derive_seed(get_typed(cfg, "seed", int), "partition"),
    )


def build_server_opt(cfg: dict[str, Value]) -> ServerOptimizerState:
    return ServerOptimizerState(
        kind=get_typed(cfg, "server.kind", str, "sgd"),
        lr=get_typed(cfg, "server.lr", float, 1.0),
        beta1=get_typed(cfg, "server.beta1", float, 0.9),
        beta2=get_typed(cfg, "server.beta2", float, 0.999),
        eps=get_typed(cfg, "server.eps", float, 1e-8),
        rho=get_typed(cfg, "server.rho", float, 0.9),
    )


def build_fed_config(cfg: dict[str, Value], seed: int | None = None) -> FedConfig:
    batch = cfg.get("fed.batch_size", 10)
    if isinstance(batch, str):
        if batch.lower() != "full":
            raise ConfigError(f"expected an integer or 'full', got {batch!r}", key="fed.batch_size")
        batch = None
    eval_every = cfg.get("fed.eval_every")
    return FedConfig(
        num_clients=get_typed(cfg, "fed.num_clients", int),
        client_fraction=get_typed(cfg, "fed.client_fraction", float),
        local_epochs=get_typed(cfg, "fed.local_epochs", int, 1),
        batch_size=batch,
        client_lr=get_typed(cfg, "fed.client_lr", float),
        rounds=get_typed(cfg, "fed.rounds", int),
        seed=seed if seed is not None else get_typed(cfg, "seed", int),
        server_opt=build_server_opt(cfg),
        update_mode=get_typed(cfg, "fed.update_mode", str, "send_weights"),
        eval_every=int(eval_every) if eval_every is not None else None,
        alg1_literal_normalization=get_typed(cfg, "fed.alg1_literal_normalization", bool, False),
    )


def build_price_sheet(cfg: dict[str, Value]) -> PriceSheet:
    base = PriceSheet.zeros() if get_typed(cfg, "price.zero", bool, False) else DEFAULT_PRICE_SHEET
    flat = base.as_flat_dict()
    instance = dict(base.instance_hourly)
    for key, value in cfg.items():
        if not key.startswith("price.") or key == "price.zero":
            continue
        name = key[len("price."):]
        price = float(get_typed(cfg, key, float))
        if name.startswith("instance."):
            role = name[len("instance."):]
            if role not in instance:
                raise ConfigError(f"unknown instance role {role!r}", key=key)
            instance[role] = price
        elif name in flat:
            flat[name] = price
        else:
            raise ConfigError("unknown price field", key=key)
    return PriceSheet(
        data_out_per_gb=flat["data_out_per_gb"],
        data_in_per_gb=flat["data_in_per_gb"],
        sync_per_gb=flat["sync_per_gb"],
        storage_per_gb_month=flat["storage_per_gb_month"],
        object_read_per_1k=flat["object_read_per_1k"],
        object_write_per_1k=flat["object_write_per_1k"],
        instance_hourly=instance,
        lb_hourly=flat["lb_hourly"],
        nat_hourly=flat["nat_hourly"],
        dns_monthly_fixed=flat["dns_monthly_fixed"],
    )


def build_fl_scenario(cfg: dict[str, Value]) -> FlScenario:
    return FlScenario(
        model_size_bytes=get_typed(cfg, "cost.model_size_bytes", float),
        rounds=get_typed(cfg, "cost.rounds", int),
        rounds_per_day=get_typed(cfg, "cost.rounds_per_day", float),
        population=get_typed(cfg, "cost.population", int, 12_000_000),
        registered=get_typed(cfg, "cost.registered", int, 500_000),
        cohort=get_typed(cfg, "cost.cohort", int, 500),
        plan_size_bytes=get_typed(cfg, "cost.plan_size_bytes", float, 50_000.0),
        msg_size_bytes=get_typed(cfg, "cost.msg_size_bytes", float, 1_000.0),
        month_hours=get_typed(cfg, "cost.month_hours", float, 730.0),
    )


def build_central_scenario(cfg: dict[str, Value]) -> CentralScenario:
    return CentralScenario(
        population=get_typed(cfg, "cost.population", int, 12_000_000),
        sync_bytes_per_device_month=get_typed(cfg, "cost.sync_bytes_per_device_month", float, 250_000.0),
        label_bytes_back=get_typed(cfg, "cost.label_bytes_back", float, 100.0),
        sync_events_per_device_month=get_typed(cfg, "cost.sync_events_per_device_month", float, 12.0),
        ingestion_count=get_typed(cfg, "cost.ingestion_count", int, 3),
        ingestion_days=get_typed(cfg, "cost.ingestion_days", float, 1.0),
        training_count=get_typed(cfg, "cost.training_count", int, 2),
        training_days=get_typed(cfg, "cost.training_days", float, 1.0),
        tagging_count=get_typed(cfg, "cost.tagging_count", int, 3),
        tagging_days=get_typed(cfg, "cost.tagging_days", float, 4.0),
        month_hours=get_typed(cfg, "cost.month_hours", float, 730.0),
    )


# ---------------------------------------------------------------- emission

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def write_rounds_csv(path: Path, history: list[RoundMetrics]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["round", "train_acc", "test_acc", "mean_client_loss", "elapsed_s"])
        for m in history:
            writer.writerow([
                m.round_index,
                _fmt(m.train_accuracy),
                _fmt(m.test_accuracy),
                _fmt(m.mean_client_loss),
                _fmt(m.elapsed_s),
            ])


def write_summary_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["arch", "samples_per_client", "final_train_acc", "final_test_acc"])
        for row in rows:
            writer.writerow([
                row["arch"],
                row["samples_per_client"],
                _fmt(row["final_train_acc"]),
                _fmt(row["final_test_acc"]),
            ])


def write_breakdown_csv(path: Path, breakdown: CostBreakdown) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["item", "name", "category", "quantity", "unit_price", "dollars"])
        for i, item in enumerate(breakdown.items):
            writer.writerow([i, item.name, item.category, _fmt(item.quantity), _fmt(item.unit_price), _fmt(item.dollars)])


def write_sweep_csv(path: Path, rows: list[SweepRow]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["value", "training_cost", "deployment_cost"])
        for row in rows:
            writer.writerow([_fmt(row.value), _fmt(row.training_cost), _fmt(row.deployment_cost)])


GNUPLOT_TEMPLATE = """\
# plot the accuracy curves from {csv} (any gnuplot >= 5)
set datafile separator ","
set xlabel "round"
set ylabel "accuracy"
set yrange [0:1]
set key bottom right
plot "{csv}" using 1:2 every ::1 with linespoints title "train", \\
     "{csv}" using 1:3 every ::1 with linespoints title "test"
"""


def write_rounds_plot_script(path: Path, csv_name: str) -> None:
    path.write_text(GNUPLOT_TEMPLATE.format(csv=csv_name))


def write_partition_csv(path: Path, shards, dataset: Dataset) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["client_id", "num_samples", "dominant_label", "census_entropy"])
        for shard in shards:
            census = shard.label_census
            p = census[census > 0] / census.sum()
            entropy = float(-(p * np.log(p)).sum())
            writer.writerow([shard.client_id, shard.num_samples, int(census.argmax()), _fmt(entropy)])


def format_breakdown_table(title: str, breakdown: CostBreakdown) -> str:
    lines = [title, "-" * len(title)]
    lines.append(f"{'name':<34} {'category':<14} {'quantity':>16} {'unit $':>12} {'dollars':>12}")
    for item in breakdown.items:
        lines.append(
            f"{item.name:<34} {item.category:<14} {item.quantity:>16.6g} {item.unit_price:>12.6g} {item.dollars:>12.2f}"
        )
    lines.append(f"{'total':<34} {'':<14} {'':>16} {'':>12} {breakdown.total:>12.2f}")
    return "\n".join(lines)


def format_sweep_table(dimension: str, rows: list[SweepRow]) -> str:
    header = f"{dimension:>16} {'training $':>14} {'deployment $':>14}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(f"{row.value:>16.6g} {row.training_cost:>14.2f} {row.deployment_cost:>14.2f}")
    return "\n".join(lines)


# ---------------------------------------------------------------- manifests

MANIFEST_NOTE = "preset hyperparameters are desk-scale simulator defaults, not published values"


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def start_manifest(out_dir: Path, command: str, cfg: dict[str, Value]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "manifest.txt"
    meta: dict[str, Value] = {
        "run.package_version": __version__,
        "run.command": command,
        "run.seed": cfg.get("seed", 0),
        "run.started_utc": _utc_now(),
        "run.status": "running",
        "run.note": MANIFEST_NOTE,
    }
    path.write_text(format_config({**cfg, **meta}))
    return path


def finish_manifest(path: Path, cfg: dict[str, Value], command: str, outputs: list[Path]) -> None:
    meta: dict[str, Value] = {
        "run.package_version": __version__,
        "run.command": command,
        "run.seed": cfg.get("seed", 0),
        "run.finished_utc": _utc_now(),
        "run.status": "complete",
        "run.outputs": ",".join(p.name for p in outputs),
        "run.note": MANIFEST_NOTE,
    }
    path.write_text(format_config({**cfg, **meta}))


# ---------------------------------------------------------------- commands

def _arch_label(layers) -> str:
    return "-".join(str(n) for n in layers)


def _preset_archs(cfg: dict[str, Value]) -> list[list[int]]:
    archs = []
    for key in sorted(k for k in cfg if k.startswith("preset.arch.")):
        value = cfg[key]
        archs.append([int(v) for v in (value if isinstance(value, list) else [value])])
    if not archs and "model.layers" in cfg:
        archs.append([int(v) for v in cfg["model.layers"]])  # type: ignore[union-attr]
    if not archs:
        raise ConfigError("no architectures configured", key="model.layers")
    return archs


def _fed_single_run(cfg, dataset, test_set, model, plan, seed) -> tuple[list[RoundMetrics], float | None, float | None]:
    shards = partition(dataset, plan)
    fed = build_fed_config(cfg, seed=seed)
    history, state = train_federated(model, fed, shards, dataset, test_set)
    final_train = final_test = None
    for m in reversed(history):
        if m.train_accuracy is not None:
            final_train, final_test = m.train_accuracy, m.test_accuracy
            break
    return history, final_train, final_test


def run_train_fed(cfg: dict[str, Value], out_dir: Path) -> list[Path]:
    experiment = cfg["experiment"]
    dataset, test_set = resolve_datasets(cfg)
    seed = get_typed(cfg, "seed", int)
    outputs: list[Path] = []

    if experiment == CUSTOM:
        model = build_model(cfg)
        plan = build_plan(cfg)
        history, _, _ = _fed_single_run(cfg, dataset, test_set, model, plan, seed)
        path = out_dir / "rounds.csv"
        write_rounds_csv(path, history)
        plot_path = out_dir / "plot_rounds.gnuplot"
        write_rounds_plot_script(plot_path, path.name)
        return [path, plot_path]

    if experiment in (SAMPLES_SWEEP, SINGLE_LABEL_SWEEP, ROUND_CURVES):
        archs = _preset_archs(cfg)
        if "preset.samples_per_client" not in cfg:
            raise ConfigError("required key missing", key="preset.samples_per_client")
        samples_values = [int(v) for v in as_list(cfg["preset.samples_per_client"])]
        base_kind = get_typed(cfg, "partition.kind", str, IID)
        summary = []
        for layers in archs:
            model = build_model(cfg, layers)
            for spc in samples_values:
                kind = base_kind
                if experiment == ROUND_CURVES and base_kind == SINGLE_LABEL and spc == 1:
                    kind = SINGLE_SAMPLE
                plan = PartitionPlan(
                    kind=kind,
                    num_clients=get_typed(cfg, "fed.num_clients", int),
                    samples_per_client=spc,
                    seed=derive_seed(seed, "partition", _arch_label(layers), spc),
                )
                run_seed = derive_seed(seed, "run", _arch_label(layers), spc)
                history, final_train, final_test = _fed_single_run(cfg, dataset, test_set, model, plan, run_seed)
                path = out_dir / f"rounds_{_arch_label(layers)}_spc{spc}.csv"
                write_rounds_csv(path, history)
                outputs.append(path)
                summary.append({
                    "arch": _arch_label(layers),
                    "samples_per_client": spc,
                    "final_train_acc": final_train,
                    "final_test_acc": final_test,
                })
        summary_path = out_dir / "summary.csv"
        write_summary_csv(summary_path, summary)
        outputs.append(summary_path)
        return outputs

    raise ConfigError(f"experiment {experiment!r} is not a federated-training preset", key="experiment")


def run_train_central(cfg: dict[str, Value], out_dir: Path) -> list[Path]:
    experiment = cfg["experiment"]
    dataset, test_set = resolve_datasets(cfg)
    seed = get_typed(cfg, "seed", int)
    lr = get_typed(cfg, "central.lr", float, 0.1)
    batch = cfg.get("central.batch_size", 32)
    if isinstance(batch, str):
        if batch.lower() != "full":
            raise ConfigError(f"expected an integer or 'full', got {batch!r}", key="central.batch_size")
        batch = None
    epochs = get_typed(cfg, "central.epochs", int, 5)

    if experiment == CENTRAL_BASELINE:
        archs = _preset_archs(cfg)
    else:
        archs = [[int(v) for v in get_typed(cfg, "model.layers", list)]]

    outputs: list[Path] = []
    summary = []
    for layers in archs:
        model = build_model(cfg, layers)
        history, _ = train_centralized(model, dataset, test_set, lr, batch, epochs, derive_seed(seed, "central", _arch_label(layers)))
        name = "rounds.csv" if len(archs) == 1 else f"central_{_arch_label(layers)}.csv"
        path = out_dir / name
        write_rounds_csv(path, history)
        outputs.append(path)
        last = history[-1] if history else None
        summary.append({
            "arch": _arch_label(layers),
            "samples_per_client": len(dataset),
            "final_train_acc": last.train_accuracy if last else None,
            "final_test_acc": last.test_accuracy if last else None,
        })
    if len(archs) > 1:
        summary_path = out_dir / "summary.csv"
        write_summary_csv(summary_path, summary)
        outputs.append(summary_path)
    return outputs


def run_cost(cfg: dict[str, Value], out_dir: Path) -> tuple[list[Path], str]:
    experiment = cfg["experiment"]
    sheet = build_price_sheet(cfg)
    outputs: list[Path] = []
    texts: list[str] = []

    if experiment in (COST_MODEL_SIZE_SWEEP, COST_ROUNDS_SWEEP, COST_ROUNDS_PER_DAY_SWEEP):
        return run_sweep(cfg, out_dir)

    scenario_kind = get_typed(cfg, "cost.scenario", str, "all")
    if scenario_kind not in ("fl_training", "fl_deployment", "central", "all"):
        raise ConfigError(f"unknown scenario {scenario_kind!r}", key="cost.scenario")

    wanted = ("fl_training", "fl_deployment", "central") if scenario_kind == "all" else (scenario_kind,)
    for kind in wanted:
        if kind == "fl_training":
            breakdown = fl_training_cost(build_fl_scenario(cfg), sheet)
            title = "federated training cost"
        elif kind == "fl_deployment":
            breakdown = fl_deployment_cost(build_fl_scenario(cfg), sheet)
            title = "federated deployment cost"
        else:
            breakdown = central_cost(build_central_scenario(cfg), sheet)
            title = "centralized training cost"
        path = out_dir / f"breakdown_{kind}.csv"
        write_breakdown_csv(path, breakdown)
        outputs.append(path)
        texts.append(format_breakdown_table(title, breakdown))
    return outputs, "\n\n".join(texts)


def run_sweep(cfg: dict[str, Value], out_dir: Path) -> tuple[list[Path], str]:
    sheet = build_price_sheet(cfg)
    dimension = get_typed(cfg, "cost.sweep.dimension", str)
    if "cost.sweep.values" not in cfg:
        raise ConfigError("required key missing", key="cost.sweep.values")
    values = [float(v) for v in as_list(cfg["cost.sweep.values"])]
    base = build_fl_scenario(cfg)
    rows = sweep(dimension, values, base, sheet)
    path = out_dir / "sweep.csv"
    write_sweep_csv(path, rows)
    return [path], format_sweep_table(dimension, rows)


def run_partition_stats(cfg: dict[str, Value], out_dir: Path) -> list[Path]:
    dataset, _ = resolve_datasets(cfg)
    plan = build_plan(cfg)
    shards = partition(dataset, plan)
    path = out_dir / "shards.csv"
    write_partition_csv(path, shards, dataset)
    return [path]
