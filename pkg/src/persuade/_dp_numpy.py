"""Pure-numpy fallback for the partition-table fill.

Kept in exact semantic lockstep with ``persuade._dp_core.dp_fill``: identical
IEEE operations per candidate, carry preferred on ties, then the smallest
predecessor index (``argmax`` returns the first maximizer).
"""

import numpy as np


def dp_fill(w, budget):
    n = w.shape[0]
    values = np.full((budget + 1, n), -np.inf)
    choices = np.full((budget + 1, n), -2, dtype=np.int32)
    values[0, 0] = 0.0
    choices[0, 0] = -1
    for k in range(1, budget + 1):
        prev = values[k - 1]
        cand = prev[:, None] + w
        best = cand.max(axis=0)
        arg = cand.argmax(axis=0).astype(np.int32)
        take = best > prev
        values[k] = np.where(take, best, prev)
        choices[k] = np.where(take, arg, np.int32(-1))
    return values, choices
