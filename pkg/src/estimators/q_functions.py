"""Truncated forward sums of costs (Monte Carlo Q-values)."""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..utils.numerics import sliding_window_sums
from .costs import CostSeries, check_truncation


FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class QSeries:
    """
    Q-values of the first ``len(costs) - truncation`` tasks.

    Attributes:
        truncation: L, the number of successor costs added to each task's own
        q: sum_{k=0..L} cost_q[j + k]
        w: sum_{k=0..L} cost_w[j + k]
    """
    truncation: int
    q: FloatArray
    w: FloatArray

    def __len__(self) -> int:
        return int(self.q.shape[0])


def q_forward_sums(costs: CostSeries, truncation: int) -> QSeries:
    """
    Forward sums of ``truncation + 1`` costs starting at each eligible task.

    The long-run average cost is not subtracted; it cancels in every arm
    difference.

    Raises:
        TruncationTooLong: If ``truncation`` is negative or not below the record count
    """
    check_truncation(len(costs), truncation)
    window = truncation + 1
    return QSeries(
        truncation=truncation,
        q=sliding_window_sums(costs.cost_q, window),
        w=sliding_window_sums(costs.cost_w, window),
    )
