import csv
import datetime
import json
import logging
import os
import platform

import numpy as np

logger = logging.getLogger(__name__)


def formatValue(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _jsonDefault(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Cannot serialize {0!r}".format(value))


class ResultWriter:
    """ Writes the flat-file artifacts of a run: CSV tables with a fixed column order and
    17-significant-digit floats, sorted JSON summaries, and a separate metadata file that is the
    only place where run-dependent data such as timestamps appears. """

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path(self, filename: str) -> str:
        return os.path.join(self.directory, filename)

    def writeCsv(self, filename: str, header, rows) -> str:
        path = self.path(filename)
        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([formatValue(v) for v in row])
        logger.info("Wrote {0}".format(path))
        return path

    def writeJson(self, filename: str, data) -> str:
        path = self.path(filename)
        with open(path, "w", encoding="utf-8") as file:
            json.dump(data, file, indent=2, sort_keys=True, default=_jsonDefault)
            file.write("\n")
        logger.info("Wrote {0}".format(path))
        return path

    def writeMetadata(self, command: str, version: str, configPath: str = None) -> str:
        return self.writeJson("metadata.json", {
            "command": command,
            "config": configPath,
            "version": version,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "timestamp": datetime.datetime.now().isoformat(timespec="seconds")
        })


def readPoints(path: str) -> np.ndarray:
    """ Two-column CSV of points with a header row (x, y). """
    with open(path, newline="", encoding="utf-8") as file:
        reader = csv.reader(file)
        next(reader, None)
        points = [[float(row[0]), float(row[1])] for row in reader if row]
    return np.array(points, dtype=float).reshape(-1, 2)
