from abc import ABC, abstractmethod
import csv
import os
from dataclasses import astuple, dataclass, fields
from typing import List

from gildrl.log import create_logger

log = create_logger(__name__)


@dataclass(slots=True)
class EvalRecord:
    step: int
    mean_dense_return: float
    std_dense_return: float


@dataclass(slots=True)
class TrainRecord:
    step: int
    critic_loss: float
    actor_loss: float
    gild_loss: float
    meta_loss: float
    wall_ms: float


@dataclass(slots=True)
class CheckpointRow:
    step: int
    eval_return: float
    path: str


class Observer(ABC):
    """
                Receives the records of a run
    """
    @abstractmethod
    def update(self, record):
        pass

    @abstractmethod
    def finish(self):
        pass


class Subject(ABC):
    """
            Emits records to its observers
    """

    def __init__(self):
        """Create an empty observer list"""
        self._observers: List[Observer] = []

    def attach(self, obs):
        """If the observer is not in the list,
        append it into the list"""
        if obs not in self._observers:
            self._observers.append(obs)

    def detach(self, obs):
        """Remove the observer from the observer list"""
        self._observers.remove(obs)

    def notify(self, record):
        """Alerts the observers"""
        for obs in self._observers:
            obs.update(record)

    def finish_observers(self):
        for obs in self._observers:
            obs.finish()


class CSVRecordObserver(Observer):
    def __init__(self, filename: str, record_type: type):
        """
        Observer appending the records of one type to a CSV file, other records are ignored.
        Every row is flushed so that the file stays complete if the run aborts.

        Args:
            -filename: The name of the file
            -record_type: dataclass of the records to write, its fields are the header
        """
        self._record_type = record_type
        self._header = [f.name for f in fields(record_type)]
        self._filename = filename
        folder = os.path.dirname(filename)
        if folder:
            os.makedirs(folder, exist_ok=True)
        self._file = open(self._filename, "w", newline='')
        self._csvhandler = csv.writer(self._file, delimiter=',')
        self._csvhandler.writerow(self._header)
        self._file.flush()

    def update(self, record):
        if not isinstance(record, self._record_type):
            return
        self._csvhandler.writerow([repr(v) if isinstance(v, float) else v for v in astuple(record)])
        self._file.flush()

    def finish(self):
        if not self._file.closed:
            self._file.close()


class CSVEvalObserver(CSVRecordObserver):
    def __init__(self, filename: str):
        super(CSVEvalObserver, self).__init__(filename, EvalRecord)


class CSVTrainObserver(CSVRecordObserver):
    def __init__(self, filename: str):
        super(CSVTrainObserver, self).__init__(filename, TrainRecord)


class CSVCheckpointObserver(CSVRecordObserver):
    def __init__(self, filename: str):
        super(CSVCheckpointObserver, self).__init__(filename, CheckpointRow)

