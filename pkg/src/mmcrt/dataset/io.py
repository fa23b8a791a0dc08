"""On-disk cohort format.

A cohort directory holds ``manifest.json`` plus one matrix file per subject
per view. Matrix files are magic ``LSM1``, two little-endian u32 (rows,
cols), then rows*cols little-endian f32 in row-major order, nothing else.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.dataset.types import LatentSequence, PairedCohort, PairedSubject, View

MAGIC = b"LSM1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sII")


def write_matrix(path, values: np.ndarray) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise InputValidationError(f"matrix file payload must be 2D, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes(order="C"))


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise InputValidationError(f"cannot read matrix file {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise InputValidationError(f"{path}: truncated header")
    magic, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise InputValidationError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * rows * cols
    if len(blob) != expected:
        raise InputValidationError(
            f"{path}: payload is {len(blob) - _HEADER.size} bytes, header declares {4 * rows * cols}")
    arr = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(rows, cols)
    if not np.all(np.isfinite(arr)):
        raise InputValidationError(f"{path}: non-finite values")
    return np.ascontiguousarray(arr)


def write_cohort(cohort: PairedCohort, path) -> Path:
    """Write a cohort directory; returns the manifest path."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    subjects = []
    for subj in cohort:
        rel_a = f"{subj.subject_id}_a.lsm"
        rel_b = f"{subj.subject_id}_b.lsm"
        write_matrix(root / rel_a, subj.view_a.values)
        write_matrix(root / rel_b, subj.view_b.values)
        subjects.append({"id": subj.subject_id, "label": int(subj.label),
                         "view_a": rel_a, "view_b": rel_b})
    manifest = {"format_version": FORMAT_VERSION, "d_a": cohort.d_a, "d_b": cohort.d_b,
                "subjects": subjects}
    manifest_path = root / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_cohort(path) -> PairedCohort:
    """Load and validate a cohort directory written by :func:`write_cohort`."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise InputValidationError(f"missing manifest: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputValidationError(f"unparseable manifest {manifest_path}: {exc}") from exc
    for key in ("format_version", "d_a", "d_b", "subjects"):
        if key not in manifest:
            raise InputValidationError(f"manifest missing field {key!r}")
    if manifest["format_version"] != FORMAT_VERSION:
        raise InputValidationError(f"unsupported format_version {manifest['format_version']!r}")
    d_a, d_b = int(manifest["d_a"]), int(manifest["d_b"])
    subjects = []
    for entry in manifest["subjects"]:
        sid = entry["id"]
        mats = {}
        for view, key, want_d in ((View.A, "view_a", d_a), (View.B, "view_b", d_b)):
            mat = read_matrix(root / entry[key])
            if mat.shape[0] != want_d:
                raise InputValidationError(
                    f"{entry[key]}: file header says {mat.shape[0]} rows, manifest declares {want_d}")
            mats[view] = mat
        subjects.append(PairedSubject(
            subject_id=sid,
            view_a=LatentSequence(mats[View.A], sid, View.A),
            view_b=LatentSequence(mats[View.B], sid, View.B),
            label=int(entry["label"])))
    return PairedCohort(tuple(subjects), d_a, d_b)
