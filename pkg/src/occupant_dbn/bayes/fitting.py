"""Count-based CPT estimation."""
from __future__ import annotations

from typing import Mapping, Sequence

from occupant_dbn.bayes.network import renormalize
from occupant_dbn.errors import NegativeCountError


def fit_cpt_from_counts(
    counts: Mapping[tuple[str, ...], Sequence[float]], smoothing: float = 0.0
) -> dict[tuple[str, ...], tuple[float, ...]]:
    """Normalize observed label counts per parent combination.

    Each row becomes ``(count + smoothing) / sum``. A row of all zeros with
    no smoothing falls back to the uniform distribution.
    """
    if smoothing < 0:
        raise NegativeCountError(f"smoothing must be nonnegative, got {smoothing}")
    cpt = {}
    for combo, row in counts.items():
        if any(c < 0 for c in row):
            raise NegativeCountError(f"negative count in row {combo}: {list(row)}")
        padded = [c + smoothing for c in row]
        total = sum(padded)
        if total == 0:
            padded = [1.0] * len(row)
            total = float(len(row))
        cpt[tuple(combo)] = renormalize([c / total for c in padded])
    return cpt
