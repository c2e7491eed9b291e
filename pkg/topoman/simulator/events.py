"""
Module: Simulation Events

Event records and the per-run transcript, one line per event. Transcripts contain only
simulated time and message content, so identical seeds give identical text.
"""

from dataclasses import dataclass

ROUND = 'ROUND'
DELIVER = 'DELIVER'
EMIT = 'EMIT'
CONTROLLER = 'CTRL'
DROP = 'DROP'
TRAFFIC = 'TRAFFIC'
HEARTBEAT = 'HEARTBEAT'
REJECT = 'REJECT'
DONE = 'DONE'


@dataclass(frozen=True)
class SimEvent:
    time: int
    seq: int
    kind: str
    detail: str

    def __str__(self):
        return f'{self.time:>6} {self.kind:<9} {self.detail}'


class Transcript:
    """Ordered event log of one simulation."""

    def __init__(self, enabled=True):
        self.enabled = enabled
        self.events = []
        self._seq = 0

    def record(self, time, kind, detail):
        self._seq += 1
        if self.enabled:
            self.events.append(SimEvent(int(time), self._seq, kind, detail))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def lines(self):
        return [str(event) for event in self.events]

    @property
    def text(self):
        return '\n'.join(self.lines) + ('\n' if self.events else '')
