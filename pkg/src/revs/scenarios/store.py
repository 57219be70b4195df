from typing import Any, Iterable, List, Optional, Set, Tuple

from revs.models.enumerations import RunMode
from revs.models.scenario import ComparisonReport, SeedRun


class ResultStore:

    """In-memory store of per-seed runs.

    Keys are '<mode>/<adoption fraction>/<seed>'. Values are 'SeedRun' models.

    In general the store does not throw exceptions as part of its own interface.
    It relies on return values and leaves it to the caller to act on them.
    """

    def __init__(self):
        self.by_key = {}


    @classmethod
    def from_reports(cls, reports: Iterable[ComparisonReport]) -> "ResultStore":
        store = cls()
        for report in reports:
            for run in report.runs:
                store.insert(cls.key(run.mode, report.adoption_fraction, run.seed), run)
        return store


    @staticmethod
    def key(mode: RunMode, fraction: float, seed: int) -> str:
        return f"{mode.value}/{fraction:g}/{seed}"


    @staticmethod
    def parse(key: str) -> Tuple[RunMode, float, int]:
        """Inverse of 'key'."""
        mode, fraction, seed = key.split("/")
        return RunMode(mode), float(fraction), int(seed)


    def lookup(self, key) -> Optional[SeedRun]:
        """Get the run stored under a key.

        Returns:
            The run, or None if the key is not present.
        """
        return self.by_key.get(key, None)


    def insert(self, key, value: SeedRun):
        """Store a run under a key if the key is not present.

        If the key is already present do not modify its value.

        Returns:
            The key the run can be found under.
            If a run is already present for that key, return None.
        """
        if key in self.by_key:
            return None
        self.by_key[key] = value
        return key


    def keys(self) -> Set[Any]:
        """Set of all keys in the store."""
        return set(self.by_key.keys())


    def entries(self) -> List[Tuple[float, SeedRun]]:
        """(adoption fraction, run) pairs ordered by fraction, seed and mode."""
        def order(key):
            mode, fraction, seed = self.parse(key)
            return fraction, seed, mode.value
        return [
            (self.parse(key)[1], self.by_key[key]) for key in sorted(self.by_key, key = order)
        ]


    def values(self) -> List[SeedRun]:
        """All runs, in entry order."""
        return [run for _, run in self.entries()]
