"""
Module: Metrics

Counters of one discovery run.
"""

from dataclasses import asdict, dataclass

import docflow as doc


@dataclass
class Metrics:
    """
    Attributes:
        probe_triggers (int): Probes generated by source middleboxes.
        up_calls (int): PROBE-UPDATE messages sent to the controller.
        sim_ticks (int): Discovery duration in ticks.
        wall_clock (float): Seconds spent in the run.
        selections (int): Probe pairs selected.
        corrections (int): UPDATE-OUTINTERFACE messages.
        resolve_requests (int): RESOLVE-PROBEID round-trips.
        drops (int): Probes dropped in transit.
        rejected (int): Controller messages rejected as corrupt or unknown.
        late_discoveries (int): Links inserted from data traffic.
    """
    probe_triggers: int = 0
    up_calls: int = 0
    sim_ticks: int = 0
    wall_clock: float = 0.0
    selections: int = 0
    corrections: int = 0
    resolve_requests: int = 0
    drops: int = 0
    rejected: int = 0
    late_discoveries: int = 0

    def to_dict(self, timing=False):
        data = asdict(self)
        if not timing:
            data.pop('wall_clock')
        return data

    def __repr__(self):
        return self.markdown

    def _repr_markdown_(self):
        return self.markdown

    def to_markdown(self, timing=False):
        return doc.Document(
            doc.Title('Discovery metrics', level=3),
            doc.Sequence({key: str(value) for key, value in self.to_dict(timing).items()}),
        ).markdown

    @property
    def markdown(self):
        """Counters without wall-clock seconds."""
        return self.to_markdown()
