import os
from pathlib import Path

import pytest

from fedsim.data import load_idx

DATA_DIR = Path(os.environ.get("FEDSIM_DATA_DIR", str(Path(__file__).resolve().parent.parent / "data")))

MNIST_NAMES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


def _find(name: str) -> Path | None:
    for candidate in (DATA_DIR / (name + ".gz"), DATA_DIR / name):
        if candidate.exists():
            return candidate
    return None


@pytest.fixture(scope="session")
def mnist():
    """Real MNIST train/test datasets, or a skip when the IDX files are absent."""
    paths = {key: _find(name) for key, name in MNIST_NAMES.items()}
    missing = [MNIST_NAMES[k] for k, v in paths.items() if v is None]
    if missing:
        pytest.skip(
            f"MNIST IDX files not found under {DATA_DIR} (missing {missing}); "
            "set FEDSIM_DATA_DIR or place the files in ./data to run this check"
        )
    train = load_idx(paths["train_images"], paths["train_labels"])
    test = load_idx(paths["test_images"], paths["test_labels"])
    assert len(train) == 60_000 and train.num_features == 784
    assert len(test) == 10_000
    return train, test
