"""Federated training engine and centralized baseline.

One aggregation round selects a random cohort of clients, trains each locally
from the same global weights, then combines the results. Two wire modes are
supported: clients send full weights (server keeps their sample-weighted
average) or send weight deltas (the server treats the negated weighted mean
delta as a pseudo-gradient for any server optimizer; with plain sgd at rate
1.0 the two modes coincide).

Everything is deterministic given the run seed: client selection, batch
order, and init all draw from seeds derived per (seed, round, client).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import ClientShard, Dataset, shard_batches
from .nn import (
    Batch,
    GradVector,
    MlpSpec,
    ParamVector,
    ServerOptimizerState,
    ShapeMismatchError,
    forward_logits,
    init_params,
    loss,
    loss_and_grad_raw,
    server_apply,
)
from .rng import derive_seed

SEND_WEIGHTS = "send_weights"
SEND_DELTA = "send_delta"

EVAL_EVERY_DEFAULT_THRESHOLD = 200  # above this many rounds, evaluate every 5th


class ClientDivergedError(RuntimeError):
    """Local training produced a non-finite loss or non-finite weights."""

    def __init__(self, client_id: int, round_index: int | None = None):
        self.client_id = client_id
        self.round_index = round_index
        where = f" in round {round_index}" if round_index is not None else ""
        super().__init__(f"client {client_id} diverged{where} (non-finite loss or weights)")


@dataclass(frozen=True)
class FedConfig:
    """Hyperparameters of a federated run.

    batch_size None means each client trains on its full shard per step,
    which together with local_epochs=1 is the one-gradient-step special case.
    """

    num_clients: int
    client_fraction: float
    local_epochs: int
    batch_size: int | None
    client_lr: float
    rounds: int
    seed: int
    server_opt: ServerOptimizerState = field(default_factory=ServerOptimizerState)
    update_mode: str = SEND_WEIGHTS
    eval_every: int | None = None
    alg1_literal_normalization: bool = False

    def __post_init__(self):
        if not (0.0 < self.client_fraction <= 1.0):
            raise ValueError("client_fraction must be in (0, 1]")
        if self.local_epochs < 1:
            raise ValueError("local_epochs must be >= 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1 or None for full-shard batches")
        if self.client_lr < 0:
            raise ValueError("client_lr must be non-negative")
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.update_mode not in (SEND_WEIGHTS, SEND_DELTA):
            raise ValueError(f"unknown update_mode {self.update_mode!r}")

    @property
    def cohort_size(self) -> int:
        return max(math.ceil(self.client_fraction * self.num_clients), 1)


@dataclass(frozen=True)
class GlobalState:
    weights: ParamVector
    round_index: int
    server_opt_state: ServerOptimizerState


@dataclass(frozen=True)
class RoundMetrics:
    round_index: int
    selected_clients: tuple[int, ...]
    mean_client_loss: float
    train_accuracy: float | None
    test_accuracy: float | None
    elapsed_s: float


def select_clients(num_clients: int, client_fraction: float, round_seed: int) -> np.ndarray:
    """Uniform random cohort of max(ceil(C*K), 1) clients, sorted by id."""
    if not (0.0 < client_fraction <= 1.0):
        raise ValueError("client_fraction must be in (0, 1]")
    m = max(math.ceil(client_fraction * num_clients), 1)
    rng = np.random.default_rng(round_seed)
    return np.sort(rng.choice(num_clients, size=m, replace=False))


def client_update(
    shard: ClientShard,
    dataset: Dataset,
    weights: ParamVector,
    local_epochs: int,
    batch_size: int | None,
    client_lr: float,
    client_seed: int,
) -> ParamVector:
    """Run the local training loop of one client and return its new weights.

    Per epoch the shard is reshuffled, split into batches, and stepped with
    plain gradient descent at client_lr. The incoming weights are untouched.
    """
    spec = weights.spec
    w = weights.values.copy()
    effective_b = shard.num_samples if batch_size is None else batch_size
    for epoch in range(local_epochs):
        batches = shard_batches(dataset, shard, effective_b, derive_seed(client_seed, "epoch", epoch))
        for batch in batches:
            batch_loss, grad = loss_and_grad_raw(w, spec, batch.inputs, batch.labels)
            if not np.isfinite(batch_loss):
                raise ClientDivergedError(shard.client_id)
            w -= client_lr * grad
    if not np.all(np.isfinite(w)):
        raise ClientDivergedError(shard.client_id)
    return ParamVector(w, spec)


def _weighted_mean(vectors: Sequence[np.ndarray], counts: Sequence[int], total: float | None) -> np.ndarray:
    denom = float(total) if total is not None else float(sum(counts))
    acc = np.zeros_like(vectors[0])
    for vec, n in zip(vectors, counts):
        acc += (n / denom) * vec
    return acc


def _check_aggregate_args(updates) -> None:
    if len(updates) == 0:
        raise ValueError("nothing to aggregate")
    spec = updates[0][0].spec
    for vec, n in updates:
        if vec.spec != spec:
            raise ShapeMismatchError("aggregation inputs disagree on architecture")
        if n < 1:
            raise ValueError("sample counts must be >= 1")


def aggregate_weights(
    updates: Sequence[tuple[ParamVector, int]], total_weight: float | None = None
) -> ParamVector:
    """Sample-count-weighted average of client weight vectors.

    Weights are n_k / sum(n_k) over the participating clients unless
    total_weight overrides the denominator (the literal global-N reading).
    """
    _check_aggregate_args(updates)
    values = _weighted_mean([u.values for u, _ in updates], [n for _, n in updates], total_weight)
    return ParamVector(values, updates[0][0].spec)


def aggregate_deltas(
    deltas: Sequence[tuple[GradVector, int]], total_weight: float | None = None
) -> GradVector:
    """Negated weighted mean of client weight deltas, as a server pseudo-gradient.

    The sign makes a plain sgd server step at rate 1.0 reproduce the weighted
    weight average exactly.
    """
    _check_aggregate_args(deltas)
    values = _weighted_mean([d.values for d, _ in deltas], [n for _, n in deltas], total_weight)
    return GradVector(-values, deltas[0][0].spec)


def evaluate(params: ParamVector, dataset: Dataset, chunk: int = 16384) -> float:
    """Fraction of argmax-correct predictions; ties go to the lowest class."""
    hits = 0
    for start in range(0, len(dataset), chunk):
        block = dataset.inputs[start : start + chunk]
        logits = forward_logits(params.values, params.spec, block)
        hits += int((logits.argmax(axis=1) == dataset.labels[start : start + chunk]).sum())
    return hits / len(dataset)


def _client_seed(run_seed: int, round_index: int, client_id: int) -> int:
    return derive_seed(run_seed, "round", round_index, "client", client_id)


def run_round(
    state: GlobalState,
    config: FedConfig,
    shards: Sequence[ClientShard],
    dataset: Dataset,
    test_set: Dataset | None = None,
    train_eval_set: Dataset | None = None,
    compute_accuracy: bool = True,
) -> tuple[GlobalState, RoundMetrics]:
    """Execute one aggregation round and return the advanced state plus metrics.

    Client updates all start from the same global weights and are aggregated
    in client-id order, so any evaluation order gives identical results.
    """
    if len(shards) != config.num_clients:
        raise ValueError(f"config says {config.num_clients} clients but got {len(shards)} shards")
    started = time.perf_counter()
    t = state.round_index
    selected = select_clients(
        config.num_clients, config.client_fraction, derive_seed(config.seed, "round", t, "select")
    )

    updates: list[tuple[ParamVector, int]] = []
    losses = []
    for client_id in selected:
        shard = shards[int(client_id)]
        try:
            local = client_update(
                shard,
                dataset,
                state.weights,
                config.local_epochs,
                config.batch_size,
                config.client_lr,
                _client_seed(config.seed, t, int(client_id)),
            )
        except ClientDivergedError as err:
            raise ClientDivergedError(err.client_id, t) from err
        updates.append((local, shard.num_samples))
        shard_all = Batch(dataset.inputs[shard.indices], dataset.labels[shard.indices])
        losses.append(loss(local, shard_all))

    total = float(sum(s.num_samples for s in shards)) if config.alg1_literal_normalization else None
    if config.update_mode == SEND_WEIGHTS:
        new_weights = aggregate_weights(updates, total)
        new_server_state = state.server_opt_state
    else:
        deltas = [
            (GradVector(local.values - state.weights.values, local.spec), n)
            for local, n in updates
        ]
        pseudo_grad = aggregate_deltas(deltas, total)
        new_weights, new_server_state = server_apply(state.server_opt_state, state.weights, pseudo_grad)

    train_acc = test_acc = None
    if compute_accuracy:
        train_acc = evaluate(new_weights, train_eval_set if train_eval_set is not None else dataset)
        if test_set is not None:
            test_acc = evaluate(new_weights, test_set)

    metrics = RoundMetrics(
        round_index=t,
        selected_clients=tuple(int(c) for c in selected),
        mean_client_loss=float(np.mean(losses)),
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        elapsed_s=time.perf_counter() - started,
    )
    return GlobalState(new_weights, t + 1, new_server_state), metrics


def train_federated(
    model: MlpSpec,
    config: FedConfig,
    shards: Sequence[ClientShard],
    dataset: Dataset,
    test_set: Dataset | None = None,
    initial_weights: ParamVector | None = None,
) -> tuple[list[RoundMetrics], GlobalState]:
    """Run the full federated loop and return per-round metrics and final state.

    Accuracy is computed on the union of the shards (the data the federation
    actually trains on) and on test_set, every eval_every rounds plus the
    final round. eval_every defaults to 1 for short runs and 5 for long ones.
    """
    weights = initial_weights if initial_weights is not None else init_params(model, derive_seed(config.seed, "init"))
    state = GlobalState(weights, 0, config.server_opt)

    eval_every = config.eval_every
    if eval_every is None:
        eval_every = 1 if config.rounds <= EVAL_EVERY_DEFAULT_THRESHOLD else 5

    union = np.sort(np.concatenate([s.indices for s in shards]))
    train_eval_set = dataset.subset(union)

    history: list[RoundMetrics] = []
    for t in range(config.rounds):
        eval_now = (t + 1) % eval_every == 0 or t == config.rounds - 1
        state, metrics = run_round(
            state, config, shards, dataset,
            test_set=test_set, train_eval_set=train_eval_set, compute_accuracy=eval_now,
        )
        history.append(metrics)
    return history, state


def train_centralized(
    model: MlpSpec,
    dataset: Dataset,
    test_set: Dataset | None,
    lr: float,
    batch_size: int | None,
    epochs: int,
    seed: int,
) -> tuple[list[RoundMetrics], ParamVector]:
    """Plain mini-batch SGD baseline; batch_size None is full-batch descent.

    Returns one RoundMetrics per epoch (round_index reused as epoch index).
    """
    weights = init_params(model, derive_seed(seed, "init"))
    w = weights.values.copy()
    n = len(dataset)
    effective_b = n if batch_size is None else batch_size
    history: list[RoundMetrics] = []
    for epoch in range(epochs):
        started = time.perf_counter()
        perm = np.random.default_rng(derive_seed(seed, "epoch", epoch)).permutation(n)
        epoch_losses = []
        for start in range(0, n, effective_b):
            idx = perm[start : start + effective_b]
            batch_loss, grad = loss_and_grad_raw(w, model, dataset.inputs[idx], dataset.labels[idx])
            if not np.isfinite(batch_loss):
                raise ClientDivergedError(client_id=-1, round_index=epoch)
            w -= lr * grad
            epoch_losses.append(batch_loss)
        params = ParamVector(w.copy(), model)
        history.append(
            RoundMetrics(
                round_index=epoch,
                selected_clients=(),
                mean_client_loss=float(np.mean(epoch_losses)),
                train_accuracy=evaluate(params, dataset),
                test_accuracy=evaluate(params, test_set) if test_set is not None else None,
                elapsed_s=time.perf_counter() - started,
            )
        )
    return history, ParamVector(w, model)
