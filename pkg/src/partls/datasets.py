"""Optional download helpers for the UCI benchmark datasets.

Archives are cached locally and checked against a SHA-256 digest. When no
digest is pinned (in :data:`REGISTRY` or by the caller) the digest of the
first download is stored next to the archive and enforced afterwards.
Nothing in the test-suite needs network access.
"""

from __future__ import annotations

import hashlib
import io
import shutil
import urllib.request
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import Dataset, Partition
from .io import write_dataset, write_partition_spec

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


@dataclass(frozen=True)
class Source:
    url: str
    member: str
    has_header: bool
    target_column: int
    block_sizes: tuple[int, ...]
    rows: int
    sha256: str | None = None


REGISTRY = {
    "superconductivity": Source(
        url=f"{UCI}/00464/superconduct.zip",
        member="train.csv",
        has_header=True,
        target_column=-1,
        block_sizes=(10,) * 7 + (11,),
        rows=10_000,
    ),
    "yearpredictionmsd": Source(
        url=f"{UCI}/00203/YearPredictionMSD.txt.zip",
        member="YearPredictionMSD.txt",
        has_header=False,
        target_column=0,
        block_sizes=(10,) * 9,
        rows=10_000,
    ),
}


def default_cache_dir() -> Path:
    return Path.home() / ".cache" / "partls"


def sha256sum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_archive(source: Source, cache_dir, sha256: str | None = None) -> Path:
    """Download ``source.url`` into ``cache_dir`` unless cached; verify its digest."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    target = cache_dir / Path(source.url).name
    pin_file = target.with_name(target.name + ".sha256")
    if not target.exists():
        tmp = target.with_name(target.name + ".part")
        with urllib.request.urlopen(source.url) as response, open(tmp, "wb") as fh:
            shutil.copyfileobj(response, fh)
        tmp.replace(target)

    digest = sha256sum(target)
    expected = sha256 or source.sha256
    if expected is None and pin_file.exists():
        expected = pin_file.read_text().strip()
    if expected is not None and digest != expected.lower():
        raise ValidationError(
            f"checksum mismatch for {target}: expected {expected}, got {digest}"
        )
    if not pin_file.exists():
        pin_file.write_text(digest + "\n")
    return target


def block_partition(block_sizes, n_features: int) -> Partition:
    """Consecutive feature blocks of the given sizes."""
    if sum(block_sizes) != n_features:
        raise ValidationError(
            f"block sizes sum to {sum(block_sizes)} but there are {n_features} features"
        )
    assignments = np.repeat(np.arange(len(block_sizes)), block_sizes)
    names = [f"block{k + 1}" for k in range(len(block_sizes))]
    return Partition.from_assignments(assignments, names)


def load_archive(source: Source, archive) -> Dataset:
    with zipfile.ZipFile(archive) as zf:
        raw = zf.read(source.member).decode("utf-8")
    table = np.loadtxt(
        io.StringIO(raw), delimiter=",", skiprows=1 if source.has_header else 0,
        max_rows=source.rows, ndmin=2,
    )
    y = table[:, source.target_column]
    X = np.delete(table, source.target_column % table.shape[1], axis=1)
    return Dataset(X, y)


def fetch(name: str, out_dir, cache_dir=None, sha256: str | None = None) -> tuple[Path, Path]:
    """Fetch a registered dataset and write ``<name>.csv`` and ``<name>.partition.json``.

    The target column is written as ``y`` and features as ``f1..fM``.
    """
    try:
        source = REGISTRY[name]
    except KeyError:
        raise ValidationError(f"unknown dataset {name!r}; known: {sorted(REGISTRY)}") from None
    archive = fetch_archive(source, cache_dir or default_cache_dir(), sha256)
    data = load_archive(source, archive)
    partition = block_partition(source.block_sizes, data.n_features)
    features = [f"f{m + 1}" for m in range(data.n_features)]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    spec_path = out_dir / f"{name}.partition.json"
    write_dataset(csv_path, data, features, target="y")
    write_partition_spec(spec_path, partition, features)
    return csv_path, spec_path
