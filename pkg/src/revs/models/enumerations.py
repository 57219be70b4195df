"""Enumeration types.

Values are the spellings used in data files and config files.
"""

from enum import Enum


class NodeKind(Enum):

    SUBSTATION = "substation"
    RESIDENCE = "residence"
    TRANSFORMER = "transformer"
    AUXILIARY = "auxiliary"


class RunMode(Enum):

    INDIVIDUAL = "individual"
    DISTRIBUTED = "distributed"
    BOTH = "both"

    def modes(self):
        """Concrete solve modes covered by this run mode."""
        if self is RunMode.BOTH:
            return (RunMode.INDIVIDUAL, RunMode.DISTRIBUTED)
        return (self,)


class VoltageBand(Enum):

    """Undervoltage bands in per-unit, left-closed."""

    BELOW_092 = "lt-0.92"
    FROM_092_TO_095 = "0.92-0.95"
    FROM_095_TO_098 = "0.95-0.98"
    NOMINAL = "ge-0.98"
