"""
Bundled example data: two six-batch, five-replicate yield data sets.

``boxtiao1`` has clear between-batch variation; ``boxtiao2`` has little.
The unbalanced variants drop the entries listed in :data:`REMOVED`
(0-based positions within each group) rather than storing separate files.
"""

from __future__ import annotations

from importlib import resources

from .errors import DataError
from .intercept import GroupedData
from .io import ingest_grouped_csv

NAMES = ("boxtiao1", "boxtiao2")

#: Group index -> positions removed to build the unbalanced variants.
REMOVED = {4: (4,), 5: (3, 4)}


def fixture_path(name: str):
    if name not in NAMES:
        raise DataError(f"unknown dataset {name!r}; choose from {', '.join(NAMES)}")
    return resources.files("csconj").joinpath("data", f"{name}.csv")


def load(name: str) -> GroupedData:
    with resources.as_file(fixture_path(name)) as p:
        return ingest_grouped_csv(p)


def remove_entries(data: GroupedData, removed=REMOVED) -> GroupedData:
    """Drop the listed within-group positions."""
    groups = []
    for j, g in enumerate(data.groups):
        drop = set(removed.get(j, ()))
        if any(i >= g.size for i in drop):
            raise DataError(f"group {j} has no position {max(drop)}")
        groups.append([v for i, v in enumerate(g) if i not in drop])
    return GroupedData(groups, data.labels)


def load_modified(name: str) -> GroupedData:
    return remove_entries(load(name))
