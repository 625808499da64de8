# simulation/metrics.py
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from utils.csv_writer import write_csv_atomic

RUN_CSV_HEADER = ["round", "mean_loss", "std_loss", "messages_sent", "merges_applied", "intra_sim", "inter_sim"]


@dataclass(frozen=True)
class RoundMetrics:
    round: int                              # 1-based
    client_losses: Tuple[float, ...]
    mean_loss: float
    std_loss: float                         # population std across clients
    messages_sent: int                      # cumulative attempted transmissions
    messages_delivered: int                 # cumulative
    merges_applied: int                     # cumulative delivered messages consumed by a merge
    intra_sim: float                        # NaN when no same-group pair exists
    inter_sim: float                        # NaN when no cross-group pair exists
    peak_live_vectors: int = 0              # largest per-client full-vector count seen this round

    @classmethod
    def from_losses(cls, round_index: int, losses: Sequence[float], messages_sent: int,
                    messages_delivered: int, merges_applied: int, intra_sim: float, inter_sim: float,
                    peak_live_vectors: int = 0) -> "RoundMetrics":
        values = np.asarray(losses, dtype=np.float64)
        return cls(
            round=round_index,
            client_losses=tuple(float(v) for v in values),
            mean_loss=float(values.mean()),
            std_loss=float(values.std()),
            messages_sent=int(messages_sent),
            messages_delivered=int(messages_delivered),
            merges_applied=int(merges_applied),
            intra_sim=float(intra_sim),
            inter_sim=float(inter_sim),
            peak_live_vectors=int(peak_live_vectors),
        )

    def csv_row(self) -> list:
        return [self.round, self.mean_loss, self.std_loss, self.messages_sent, self.merges_applied,
                self.intra_sim, self.inter_sim]


@dataclass
class MetricsTable:
    config_digest: str
    dataset_digest: str
    rounds: List[RoundMetrics] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rounds)

    def final(self) -> RoundMetrics:
        return self.rounds[-1]

    @property
    def total_messages(self) -> int:
        return self.rounds[-1].messages_sent if self.rounds else 0

    def rounds_to_threshold(self, threshold: float) -> int:
        """First round whose mean loss is below `threshold`, or -1."""
        for metrics in self.rounds:
            if not math.isnan(metrics.mean_loss) and metrics.mean_loss < threshold:
                return metrics.round
        return -1

    def csv_rows(self) -> List[list]:
        return [metrics.csv_row() for metrics in self.rounds]

    def write_csv(self, path: str) -> str:
        return write_csv_atomic(path, RUN_CSV_HEADER, self.csv_rows())
