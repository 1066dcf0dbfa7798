"""Extreme non-iid regimes: one label per device, and one sample per device.

Three partitionings of the same synthetic problem, same budget per device:
  iid            each shard mixes all labels
  single label   each shard holds 50 samples of exactly one class
  single sample  each shard holds one sample (reduces to mini-batch SGD)

The single-label runs aggregate "label overfitted" client updates, which
drags generalization below the iid baseline; the single-sample curve learns
much more slowly than its multi-sample counterpart.
"""

import numpy as np

from fedsim import FedConfig, MlpSpec, PartitionPlan, partition, synth_dataset, train_federated
from fedsim.rng import derive_seed


def run(kind, samples_per_client, rounds=60):
    curves = []
    for seed in range(2):
        train = synth_dataset(10, 100, 4000, derive_seed(seed, "demo3-train"))
        test = synth_dataset(10, 100, 1500, derive_seed(seed, "demo3-test"))
        shards = partition(
            train,
            PartitionPlan(kind, num_clients=20, samples_per_client=samples_per_client,
                          seed=derive_seed(seed, "demo3-p", kind, samples_per_client)),
        )
        config = FedConfig(num_clients=20, client_fraction=0.5, local_epochs=8, batch_size=10,
                           client_lr=0.3, rounds=rounds, seed=seed, eval_every=10)
        history, _ = train_federated(MlpSpec((100, 128, 10)), config, shards, train, test)
        curves.append([(m.round_index, m.train_accuracy, m.test_accuracy)
                       for m in history if m.train_accuracy is not None])
    rounds_idx = [r for r, _, _ in curves[0]]
    train_curve = np.mean([[tr for _, tr, _ in c] for c in curves], axis=0)
    test_curve = np.mean([[te for _, _, te in c] for c in curves], axis=0)
    return rounds_idx, train_curve, test_curve


print("=== final accuracies at a matched budget (50 samples/device) ===")
for kind in ("iid", "single_label_multi_sample"):
    _, train_curve, test_curve = run(kind, 50)
    print(f"{kind:>26}: train {train_curve[-1]:.3f}  test {test_curve[-1]:.3f}")

print()
print("=== learning curves: one sample vs ten samples per device ===")
rounds_idx, _, single = run("single_sample", 1)
_, _, multi = run("single_label_multi_sample", 10)
print(f"{'round':>6} {'1 sample':>9} {'10 samples':>11}")
for r, s, m in zip(rounds_idx, single, multi):
    print(f"{r:>6} {s:>9.3f} {m:>11.3f}")
