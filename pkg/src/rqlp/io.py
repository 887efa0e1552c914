"""File formats: binary matrices, key=value sidecars and result CSVs.

Binary layout (little endian)::

    b"RQLPMAT1"  u64 version  u64 rows  u64 cols  float64[rows * cols] (column major)
"""
import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import as_matrix

MAGIC = b"RQLPMAT1"
FORMAT_VERSION = 1
SCHEMA = 1
HEADER = ["schema", "algorithm", "family", "n", "k", "p", "l1", "l2", "seed", "status", "ef", "elapsed_s"]
SV_TAG = "sv"

_HEAD = struct.Struct("<8sQQQ")


class FormatError(ValueError):
    pass


def write_matrix(path, A):
    A = as_matrix(A)
    rows, cols = A.shape
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, FORMAT_VERSION, rows, cols))
        fh.write(np.asarray(A, dtype="<f8").tobytes(order="F"))


def read_matrix(path):
    data = Path(path).read_bytes()
    if len(data) < _HEAD.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, rows, cols = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    payload = data[_HEAD.size:]
    if len(payload) != 8 * rows * cols:
        raise FormatError(f"{path}: expected {8 * rows * cols} payload bytes, got {len(payload)}")
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return np.asfortranarray(flat.reshape((rows, cols), order="F"))


def meta_path(path):
    return Path(str(path) + ".meta")


def write_meta(path, meta):
    """Write ``meta`` as key=value lines; arrays become comma-joined reprs."""
    lines = []
    for key, value in meta.items():
        if isinstance(value, (list, tuple, np.ndarray)):
            value = ",".join(repr(float(v)) for v in value)
        lines.append(f"{key}={value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_meta(path):
    meta = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        meta[key] = value
    return meta


def meta_sigmas(meta):
    raw = meta.get("sigmas", "")
    if not raw:
        return None
    return np.array([float(v) for v in raw.split(",")])


@dataclass
class ExperimentRecord:
    algorithm: str
    family: str
    n: int
    k: int
    p: int
    l1: int
    l2: int
    seed: int
    status: str
    ef: float
    elapsed_s: float
    sv: list = field(default_factory=list)  # (j, sigma_ref, l_abs, ae, re)

    def sort_key(self):
        return (self.algorithm, self.k, self.seed)

    def rows(self):
        head = [SCHEMA, self.algorithm, self.family, self.n, self.k, self.p, self.l1,
                self.l2, self.seed, self.status, repr(float(self.ef)), repr(float(self.elapsed_s))]
        out = [[str(v) for v in head]]
        for j, sig, la, ae, re in self.sv:
            out.append([SV_TAG, str(j), repr(float(sig)), repr(float(la)), repr(float(ae)), repr(float(re))])
        return out


def write_records(path, records, append=False):
    """Write records under the fixed header; appending skips the header if present."""
    path = Path(path)
    need_header = not (append and path.exists() and path.stat().st_size > 0)
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if need_header:
            w.writerow(HEADER)
        for rec in records:
            w.writerows(rec.rows())


def read_records(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise FormatError(f"{path}: unexpected header {header}")
        for row in reader:
            if not row:
                continue
            if row[0] == SV_TAG:
                if not records:
                    raise FormatError(f"{path}: sv row before any record")
                j, *vals = row[1:]
                records[-1].sv.append((int(j), *(float(v) for v in vals)))
                continue
            if int(row[0]) != SCHEMA or len(row) != len(HEADER):
                raise FormatError(f"{path}: malformed record {row}")
            _, alg, fam, n, k, p, l1, l2, seed, status, ef, el = row
            records.append(ExperimentRecord(alg, fam, int(n), int(k), int(p), int(l1), int(l2),
                                            int(seed), status, float(ef), float(el)))
    return records
