"""
Module: Device Monitor

Heartbeat-based device status. A device is DOWN once `misses` heartbeat intervals
pass without a heartbeat from it.
"""

import logging

logger = logging.getLogger(__name__)

UP = 'UP'
DOWN = 'DOWN'
UNKNOWN = 'UNKNOWN'


class DeviceMonitor:
    """
    Args:
        interval (int): Heartbeat interval in ticks.
        misses (int): Missed intervals before a device is DOWN.
    """

    def __init__(self, interval=1, misses=3):
        self.interval = interval
        self.misses = misses
        self.last_seen = {}
        self._reported = {}

    def register(self, device_id, now=0):
        self.last_seen.setdefault(device_id, now)

    def reset(self, now):
        """Treats every known device as seen at `now`."""
        for device_id in self.last_seen:
            self.last_seen[device_id] = max(self.last_seen[device_id], now)

    def observe(self, heartbeat):
        self.last_seen[heartbeat.device_id] = max(heartbeat.time, self.last_seen.get(heartbeat.device_id, 0))

    def status(self, device_id, now):
        last = self.last_seen.get(device_id)
        if last is None:
            return UNKNOWN
        return DOWN if now - last >= self.misses * self.interval else UP

    def sweep(self, now):
        """Statuses of every known device; transitions are logged once."""
        statuses = {device_id: self.status(device_id, now) for device_id in sorted(self.last_seen)}
        for device_id, status in statuses.items():
            if self._reported.get(device_id, UP) != status:
                logger.info('device %s is %s at %d', device_id, status, now)
            self._reported[device_id] = status
        return statuses
