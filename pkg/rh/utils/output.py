#! /usr/bin/env python3

import csv
import json
import os

import numpy as np

__all__ = ["format_float", "write_csv", "NumpyEncoder", "write_json"]

# 17 significant digits round-trip any IEEE double
FLOAT_FORMAT = "{:.17g}"

def format_float(value):
    return FLOAT_FORMAT.format(value)

def write_csv(path, header, rows):
    """
    Write ``rows`` (an iterable of sequences) to ``path`` with a header row.
    Floats are written with 17 significant digits, other values with
    :py:func:`str`.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])

class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.bool_):
            return bool(obj)
        else:
            return super().default(obj)

def write_json(path, data):
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        json.dump(data, f, cls=NumpyEncoder, indent=2, sort_keys=False)
        f.write("\n")
    os.replace(tmp, path)
