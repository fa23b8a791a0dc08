"""Core data types: latent-sequence matrices and paired-view cohorts."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from mmcrt.errors import InputValidationError

CANONICAL_FRAMES = 25


class View(str, Enum):
    """The two aligned views of a subject (A is CMR-like, B is echo-like)."""

    A = "A"
    B = "B"

    @classmethod
    def parse(cls, value) -> "View":
        if isinstance(value, View):
            return value
        key = str(value).strip().lower()
        aliases = {"a": cls.A, "cmr": cls.A, "view_a": cls.A,
                   "b": cls.B, "echo": cls.B, "view_b": cls.B}
        if key not in aliases:
            raise InputValidationError(f"unknown view {value!r}; expected one of a/b/cmr/echo")
        return aliases[key]


def _as_matrix(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float32)
    if arr.ndim != 2:
        raise InputValidationError(f"latent sequence must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 2:
        raise InputValidationError(f"latent sequence needs D >= 1 rows and T >= 2 columns, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("latent sequence contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LatentSequence:
    """One subject's one-view matrix: rows are latent dimensions, columns are frames."""

    values: np.ndarray
    subject_id: str
    view: View

    def __post_init__(self):
        object.__setattr__(self, "values", _as_matrix(self.values))
        object.__setattr__(self, "view", View.parse(self.view))

    @property
    def n_latents(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatentSequence):
            return NotImplemented
        return (self.subject_id == other.subject_id and self.view == other.view
                and self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class PairedSubject:
    """A labelled subject with two aligned views. Label 1 is the responder class."""

    subject_id: str
    view_a: LatentSequence
    view_b: LatentSequence
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise InputValidationError(f"label must be 0 or 1, got {self.label!r}")
        if self.view_a.view is not View.A or self.view_b.view is not View.B:
            raise InputValidationError(f"subject {self.subject_id}: view tags are swapped or wrong")
        if self.view_a.n_frames != self.view_b.n_frames:
            raise InputValidationError(
                f"subject {self.subject_id}: frame counts differ between views "
                f"({self.view_a.n_frames} vs {self.view_b.n_frames})")

    def sequence(self, view: View) -> LatentSequence:
        return self.view_a if View.parse(view) is View.A else self.view_b

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairedSubject):
            return NotImplemented
        return (self.subject_id == other.subject_id and self.label == other.label
                and self.view_a == other.view_a and self.view_b == other.view_b)


@dataclass(frozen=True)
class PairedCohort:
    """Ordered collection of paired subjects with uniform per-view dimensions."""

    subjects: tuple
    d_a: int = field(default=0)
    d_b: int = field(default=0)

    def __post_init__(self):
        subjects = tuple(self.subjects)
        if not subjects:
            raise InputValidationError("cohort is empty")
        object.__setattr__(self, "subjects", subjects)
        d_a = self.d_a or subjects[0].view_a.n_latents
        d_b = self.d_b or subjects[0].view_b.n_latents
        object.__setattr__(self, "d_a", d_a)
        object.__setattr__(self, "d_b", d_b)
        seen = set()
        for s in subjects:
            if s.subject_id in seen:
                raise InputValidationError(f"duplicate subject id {s.subject_id!r}")
            seen.add(s.subject_id)
            if s.view_a.n_latents != d_a:
                raise InputValidationError(
                    f"subject {s.subject_id}: view A has {s.view_a.n_latents} latents, cohort declares {d_a}")
            if s.view_b.n_latents != d_b:
                raise InputValidationError(
                    f"subject {s.subject_id}: view B has {s.view_b.n_latents} latents, cohort declares {d_b}")
            if s.view_a.n_frames != CANONICAL_FRAMES:
                raise InputValidationError(
                    f"subject {s.subject_id}: cohort sequences must have {CANONICAL_FRAMES} frames "
                    f"(got {s.view_a.n_frames}); resample first")

    def __len__(self) -> int:
        return len(self.subjects)

    def __iter__(self):
        return iter(self.subjects)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.subjects], dtype=np.int64)

    def subset(self, indices) -> "PairedCohort":
        return PairedCohort(tuple(self.subjects[i] for i in indices), self.d_a, self.d_b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairedCohort):
            return NotImplemented
        return (self.d_a == other.d_a and self.d_b == other.d_b
                and len(self.subjects) == len(other.subjects)
                and all(a == b for a, b in zip(self.subjects, other.subjects)))
