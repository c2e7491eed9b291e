"""
Module: Suite Progress

A terminal progress line for long experiment suites: a rotating marker, the current
run, a done/total counter and optionally the elapsed time. A disabled indicator
writes nothing, so the same code path serves `--quiet` runs.
"""

import sys
import time

MARKERS = '⢿⣻⣽⣾⣷⣯⣟⡿'


def format_elapsed(seconds):
    minutes, seconds = divmod(seconds, 60)
    hours, minutes = divmod(int(minutes), 60)
    if hours:
        return f'{hours}h{minutes}m{seconds:.1f}s'
    if minutes:
        return f'{minutes}m{seconds:.1f}s'
    return f'{seconds:.1f}s'


class LoadProgress:
    """
    Spinner line on a terminal stream, one step per finished network.

    Attributes:
        _desc (str): Description of the current task.
        _this_marker (int): Current marker index.
        _time_start (float): Start time.
        _timer (bool): Show the elapsed time.
        _total (int): Number of steps, or None when unknown.
        _count (int): Steps completed so far.
        _enabled (bool): Write to the stream at all.
        _last_write_len (int): Length of the last written line.
    """

    def __init__(self, desc='', timer=False, total=None, enabled=True, stream=None):
        """
        Args:
            desc (str): Description of the task. Defaults to an empty string.
            timer (bool): If True, displays elapsed time. Defaults to False.
            total (int, optional): Number of steps for the counter.
            enabled (bool): If False, nothing is written. Defaults to True.
            stream (optional): Output stream. Defaults to standard error.
        """
        self._desc = desc
        self._markers = MARKERS
        self._this_marker = 0
        self._time_start = time.perf_counter()
        self._timer = timer
        self._total = total
        self._count = 0
        self._enabled = enabled
        self._stream = stream or sys.stderr
        self._last_write_len = 0
        self.show()

    @property
    def count(self):
        return self._count

    def update(self, desc=None, marker=None):
        """
        Updates the description and rotates the marker.

        Args:
            desc (str, optional): New description. If None, keeps the current one.
            marker (str, optional): Marker to display. If None, rotates to the next one.
        """
        self._desc = self._desc if desc is None else desc
        self._this_marker = (self._this_marker + 1) % len(self._markers)
        self.show(marker=marker)

    def step(self, desc=None):
        """Counts one finished step."""
        self._count += 1
        self.update(desc)

    def show(self, marker=None):
        """Redraws the progress line."""
        if not self._enabled:
            return
        _marker = self._markers[self._this_marker] if marker is None else marker
        _counter = f' ({self._count}/{self._total})' if self._total else ''
        _write_str = f'{_marker} {self._desc}{_counter}'
        if self._timer:
            _write_str = f'[{format_elapsed(time.perf_counter() - self._time_start)}] {_write_str}'

        # pad over the previous line
        self._stream.write('\r' + _write_str.ljust(self._last_write_len))
        self._stream.flush()
        self._last_write_len = len(_write_str)

    def done(self, desc=None):
        """Marks the progress as completed with a checkmark."""
        self.update(desc=desc, marker='✓')
        if self._enabled:
            self._stream.write('\n')

    def error(self, desc=None):
        """Marks the progress as errored with a cross."""
        self.update(desc=desc, marker='✗')
        if self._enabled:
            self._stream.write('\n')
