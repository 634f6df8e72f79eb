"""Part label vocabulary.

Label indices are stable API: 0..30 in the order below, with UNLABELED as a
sentinel (-1) that is excluded from losses and metrics.
"""

from __future__ import annotations

from enum import IntEnum


class PartLabel(IntEnum):
    WINDOW = 0
    PLANT = 1
    WALL = 2
    ROOF = 3
    BANISTER = 4
    VEHICLE = 5
    DOOR = 6
    FENCE = 7
    FURNITURE = 8
    COLUMN = 9
    BEAM = 10
    TOWER = 11
    STAIRS = 12
    SHUTTERS = 13
    GROUND = 14
    GARAGE = 15
    PARAPET = 16
    BALCONY = 17
    FLOOR = 18
    BUTTRESS = 19
    DOME = 20
    PATH = 21
    CEILING = 22
    CHIMNEY = 23
    GATE = 24
    LIGHTING = 25
    DORMER = 26
    POOL = 27
    ROAD = 28
    ARCH = 29
    AWNING = 30


UNLABELED = -1
NUM_LABELS = len(PartLabel)

_NAME_TO_LABEL = {label.name.lower(): label for label in PartLabel}


def label_from_name(name: str) -> int:
    """Map a label string (case-insensitive) to its index; 'unlabeled' maps to the sentinel."""
    key = name.strip().lower()
    if key in ("unlabeled", "none", ""):
        return UNLABELED
    try:
        return int(_NAME_TO_LABEL[key])
    except KeyError:
        raise ValueError(f"unknown part label {name!r}") from None


def label_name(index: int) -> str:
    if index == UNLABELED:
        return "unlabeled"
    return PartLabel(index).name.lower()
