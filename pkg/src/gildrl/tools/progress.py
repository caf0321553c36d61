import sys
from math import ceil
from time import perf_counter_ns


def _format(timing):
    timing = float(timing)
    if timing < 6e10:
        return f"{int(timing / 1e9)} s"
    elif timing < 3.6e+12:
        return f"{int(timing / 6e10)} min"
    else:
        return f"{int(timing /  3.6e+12)} hours"


class ProgressBar(object):
    def __init__(self, stop: int, start=0, text='Train', size_bar=20, item='■', enabled=True, stream=None):
        """Console progress bar with a remaining time estimate.

        Args:
            -stop: number of updates for a full bar
            -start: initial index
            -text: prefix of the bar
            -enabled: when False every call is a no-op
            -stream: where to print, stdout by default
        """
        self._max = max(int(stop), 1)
        self._index = start
        self._text = text
        self._size_bar = size_bar
        self._item = item
        self._enabled = enabled
        self._stream = stream if stream is not None else sys.stdout

        self._bar = None
        self._ptime = None
        self._mean_time = 0

    def update(self, n: int = 1):
        if not self._enabled:
            return
        timing = perf_counter_ns()
        self._index = min(self._index + n, self._max)
        cur = (self._index/self._max)*self._size_bar
        nb_hash = ceil(cur)
        perc = round(self._index/self._max*100)
        prog = self._item*nb_hash+' '*(self._size_bar-nb_hash)
        self._bar = f"\r{self._text} |{prog}| {perc} %"

        if self._ptime is not None:
            new_iter_time = (timing - self._ptime) / n
            self._mean_time = self._mean_time + (new_iter_time - self._mean_time)/self._index
            remaining_time = self._mean_time*(self._max - self._index)
            self._bar += f" | remain ~ {_format(remaining_time)}"

        self._ptime = perf_counter_ns()

    def show(self):
        if self._enabled and self._bar is not None:
            print(self._bar, end='', flush=True, file=self._stream)

    def end(self) -> None:
        if self._enabled:
            print("", file=self._stream)
