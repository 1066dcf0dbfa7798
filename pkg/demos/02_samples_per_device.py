"""How the number of samples held per device shapes federated accuracy.

Runs the same federated configuration over shards of 1, 10 and 50 samples
per device (iid label mix) and prints the final accuracies. Fewer samples per
device means noisier client updates and slower learning; the effect is the
same one the MNIST presets (`fedsim train-fed --set experiment=samples_sweep`)
show at full scale.
"""

import numpy as np

from fedsim import FedConfig, MlpSpec, PartitionPlan, partition, synth_dataset, train_federated
from fedsim.rng import derive_seed

print(f"{'samples/device':>14} {'clients':>8} {'train acc':>10} {'test acc':>9}")
for samples_per_client in (1, 10, 50):
    accs = []
    for seed in range(2):
        train = synth_dataset(10, 20, 8000, derive_seed(seed, "demo2-train"))
        test = synth_dataset(10, 20, 2000, derive_seed(seed, "demo2-test"))
        shards = partition(
            train,
            PartitionPlan("iid", num_clients=40, samples_per_client=samples_per_client,
                          seed=derive_seed(seed, "demo2-p", samples_per_client)),
        )
        config = FedConfig(num_clients=40, client_fraction=0.25, local_epochs=3, batch_size=10,
                           client_lr=0.2, rounds=40, seed=seed, eval_every=40)
        history, _ = train_federated(MlpSpec((20, 32, 10)), config, shards, train, test)
        accs.append((history[-1].train_accuracy, history[-1].test_accuracy))
    train_acc = np.mean([a for a, _ in accs])
    test_acc = np.mean([b for _, b in accs])
    print(f"{samples_per_client:>14} {40:>8} {train_acc:>10.3f} {test_acc:>9.3f}")

print()
print("more local data per device -> less noisy aggregated updates -> higher accuracy")
