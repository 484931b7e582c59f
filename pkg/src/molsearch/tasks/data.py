"""Labeled molecule datasets: CSV loading, seeded splitting, test-split guard."""
from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..molgraph import canonical_smiles, parse_smiles, sanitize
from ..molgraph.smiles import SmilesError

logger = logging.getLogger(__name__)

__all__ = [
    "DataRecord",
    "Dataset",
    "TestSplitLockedError",
    "load_dataset",
    "split_dataset",
]

SPLIT_NAMES = ("train", "valid", "test")


class TestSplitLockedError(RuntimeError):
    """Raised when test-split rows are requested before finalization."""

    __test__ = False  # keep pytest from collecting the Test* name


@dataclass(frozen=True)
class DataRecord:
    """One labeled molecule; `split` is None until the dataset is split."""

    smiles: str
    label: float
    split: Optional[str] = None


class Dataset:
    """Immutable record store with guarded, counted split access.

    The test split stays locked until `unlock_test()` is called; every
    successful split read is counted in `read_counts`, so a pipeline can
    prove it never touched held-out rows while searching.
    """

    def __init__(self, records, seed: Optional[int] = None, dropped: int = 0):
        self._records = tuple(records)
        self.seed = seed
        self.dropped = dropped
        self.read_counts = {name: 0 for name in SPLIT_NAMES}
        self._test_unlocked = False

    def __len__(self) -> int:
        return len(self._records)

    def counts(self) -> dict:
        """Rows per split (no read is recorded for counting)."""
        out = {name: 0 for name in SPLIT_NAMES}
        for record in self._records:
            if record.split is not None:
                out[record.split] += 1
        return out

    @property
    def is_split(self) -> bool:
        return all(record.split is not None for record in self._records)

    @property
    def test_unlocked(self) -> bool:
        return self._test_unlocked

    def unlock_test(self) -> None:
        """Declare the search over; test rows may be read from now on."""
        self._test_unlocked = True

    def items(self, split: str) -> list[DataRecord]:
        """Rows of one split. Counted; test rows refuse to come out early."""
        if split not in SPLIT_NAMES:
            raise ValueError(f"unknown split {split!r}; expected one of {SPLIT_NAMES}")
        if split == "test" and not self._test_unlocked:
            raise TestSplitLockedError(
                "test split is locked until the search is finalized"
            )
        self.read_counts[split] += 1
        return [record for record in self._records if record.split == split]

    def replace_records(self, records, seed: Optional[int]) -> "Dataset":
        """New dataset with the same provenance but different rows/seed."""
        return Dataset(records, seed=seed, dropped=self.dropped)


def load_dataset(path) -> Dataset:
    """Read a `smiles,label` CSV; malformed or unsanitizable rows are dropped.

    Surviving SMILES are stored in canonical form.  The number of dropped
    rows is reported in the log and kept on the dataset.
    """
    path = Path(path)
    records: list[DataRecord] = []
    bad_rows: list[int] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        if "smiles" not in fields or "label" not in fields:
            raise ValueError(
                f"{path.name}: expected a header with smiles,label columns, "
                f"got {fields!r}"
            )
        for row_number, row in enumerate(reader, start=2):
            text = (row.get("smiles") or "").strip()
            raw_label = (row.get("label") or "").strip()
            try:
                label = float(raw_label)
                mol = parse_smiles(text)
                report = sanitize(mol)
                if not report.valid:
                    raise ValueError(report.issues[0][1])
            except (ValueError, SmilesError) as exc:
                logger.warning("%s row %d dropped: %s", path.name, row_number, exc)
                bad_rows.append(row_number)
                continue
            records.append(DataRecord(smiles=canonical_smiles(mol), label=label))
    if bad_rows:
        logger.warning(
            "%s: dropped %d of %d rows at load", path.name, len(bad_rows),
            len(bad_rows) + len(records),
        )
    return Dataset(records, dropped=len(bad_rows))


def split_dataset(ds: Dataset, seed: int) -> Dataset:
    """Assign rows 80/10/10 train/valid/test by seeded shuffle.

    Fractions are by count with the remainder going to train, so every row
    lands in exactly one split.  The same seed always produces the same
    assignment.
    """
    n = len(ds)
    if n < 10:
        raise ValueError(f"need at least 10 records to split, have {n}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_test = n // 10
    n_valid = n // 10
    n_train = n - n_valid - n_test
    assignment = {}
    for position, index in enumerate(order):
        if position < n_train:
            assignment[index] = "train"
        elif position < n_train + n_valid:
            assignment[index] = "valid"
        else:
            assignment[index] = "test"
    records = [
        DataRecord(smiles=record.smiles, label=record.label, split=assignment[i])
        for i, record in enumerate(ds._records)
    ]
    return ds.replace_records(records, seed=seed)
