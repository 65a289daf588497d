import json
import logging
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from simulate import Trajectory

logger = logging.getLogger('report_exporter')


class ReportExporter:
    """Writes JSON reports and CSV tables to an output directory, or to stdout when there is none"""

    def __init__(self, output_dir: Optional[str] = None, precision: int = 6, stream=None):
        self.output_dir = output_dir
        self.precision = precision
        self.stream = stream or sys.stdout
        if output_dir:
            os.makedirs(output_dir, exist_ok=True)

    def is_writing_files(self):
        return bool(self.output_dir)

    def format_number(self, value) -> str:
        """Locale-independent decimal text with the configured significant digits"""
        return format(float(value), f'.{self.precision}g')

    def rounded(self, data):
        """Copy of a JSON-ready structure with every float cut to the configured digits"""
        if isinstance(data, dict):
            return {key: self.rounded(value) for key, value in data.items()}
        if isinstance(data, (list, tuple)):
            return [self.rounded(value) for value in data]
        if isinstance(data, (bool, np.bool_)):
            return bool(data)
        if isinstance(data, (int, np.integer)):
            return int(data)
        if isinstance(data, (float, np.floating)):
            value = float(data)
            if not math.isfinite(value):
                return None
            return float(self.format_number(value))
        return data

    def _path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def write_json(self, name: str, data) -> Optional[str]:
        text = json.dumps(self.rounded(data), indent=2, sort_keys=False)
        if not self.is_writing_files():
            self.stream.write(text + "\n")
            return None
        path = self._path(name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"Wrote {path}")
        return path

    def write_table(self, name: str, frame: pd.DataFrame) -> Optional[str]:
        text = frame.to_csv(index=False, float_format=self.format_number, lineterminator="\n")
        if not self.is_writing_files():
            self.stream.write(text)
            return None
        path = self._path(name)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f"Wrote {path} ({len(frame)} rows)")
        return path

    def trajectory_frame(self, trajectory: Trajectory) -> pd.DataFrame:
        """Columns t, x1, ..., xn"""
        states = np.asarray(trajectory.states, dtype=float)
        width = states.shape[1] if states.ndim == 2 else 0
        frame = pd.DataFrame(states, columns=[f"x{i + 1}" for i in range(width)])
        frame.insert(0, "t", np.asarray(trajectory.times, dtype=float))
        return frame

    def write_trajectory(self, name: str, trajectory: Trajectory) -> Optional[str]:
        return self.write_table(name, self.trajectory_frame(trajectory))

    def write_portrait(self, trajectories: Sequence[Trajectory], initials: Sequence[Sequence[float]],
                       attractors: Sequence) -> List[dict]:
        """
        One CSV per trajectory plus index.json of {initial, status, attractor, file}.

        Without an output directory only the index is written, to stdout.
        """
        index = []
        for number, (trajectory, initial, attractor) in enumerate(zip(trajectories, initials, attractors)):
            entry = {
                "initial": list(initial),
                "status": trajectory.status.value,
                "blowup_time": trajectory.blowup_time,
                "attractor": attractor,
            }
            if self.is_writing_files():
                name = f"trajectory_{number:04d}.csv"
                self.write_trajectory(name, trajectory)
                entry["file"] = name
            index.append(entry)
        self.write_json("index.json", index)
        return index
