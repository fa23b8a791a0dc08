"""Synthetic paired-view cohort generator with known shared structure.

Each subject carries a small set of shared temporal modes whose amplitudes
are class-conditional. Half of the modes enter the views as coherent
waveforms under distinct per-view nonlinearities (visible to linear
cross-view analysis); the other half are amplitude-coded onto per-view
random-frequency carriers, so their cross-view structure is only accessible
to rectifying feature extractors. View-specific nuisance components and
Gaussian noise complete the mix. The label depends only on the shared
amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mmcrt.errors import InputValidationError
from mmcrt.dataset.resample import resample_temporal
from mmcrt.dataset.types import CANONICAL_FRAMES, LatentSequence, PairedCohort, PairedSubject, View

# Internal generator constants (not part of SynthConfig): nuisance geometry,
# the class-conditional amplitude law, and carrier bands. Amplitude offsets
# alternate in sign per mode so total signal energy is roughly
# class-independent. Mode phases are cohort-level with small per-subject
# jitter; amplitude-modulated carriers draw a fresh frequency per subject and
# view so no fixed linear pixel functional can phase-lock onto them.
_NUISANCE_RANK = 6
_NUISANCE_SCALE = 2.0
_BAND_NUISANCE_RANK = 4
_BAND_NUISANCE_SCALE = 5.0
_AMP_MEAN = 1.0
_AMP_CLASS_DELTA = 0.35
_AMP_SD = 0.18
_PHASE_JITTER = 0.25
_CARRIER_BAND = (6.0, 10.0)
_LABEL_ON_LINEAR_MODES = False


@dataclass(frozen=True)
class SynthConfig:
    n_subjects: int = 50
    n_responders: int = 32
    d_a: int = 32
    d_b: int = 32
    shared_dim: int = 4
    shared_strength: float = 5.0
    noise_sigma: float = 0.1
    frames_raw: int = 40
    seed: int = 0

    def __post_init__(self):
        if self.n_subjects < 2:
            raise InputValidationError(f"n_subjects must be >= 2, got {self.n_subjects}")
        if not 0 <= self.n_responders <= self.n_subjects:
            raise InputValidationError(
                f"n_responders must be in [0, {self.n_subjects}], got {self.n_responders}")
        if self.d_a < 1 or self.d_b < 1:
            raise InputValidationError("latent dimensions must be positive")
        if not 1 <= self.shared_dim <= min(self.d_a, self.d_b):
            raise InputValidationError(
                f"shared_dim must be in [1, {min(self.d_a, self.d_b)}], got {self.shared_dim}")
        if self.shared_strength < 0:
            raise InputValidationError(f"shared_strength must be >= 0, got {self.shared_strength}")
        if self.noise_sigma <= 0:
            raise InputValidationError(f"noise_sigma must be > 0, got {self.noise_sigma}")
        if self.frames_raw < 2:
            raise InputValidationError(f"frames_raw must be >= 2, got {self.frames_raw}")
        if self.seed < 0:
            raise InputValidationError(f"seed must be non-negative, got {self.seed}")

    @property
    def n_linear_modes(self) -> int:
        return (self.shared_dim + 1) // 2


@dataclass(frozen=True)
class GroundTruth:
    """Per-subject shared-signal record: what the views have in common."""

    mode_freqs: np.ndarray           # (shared_dim,) cycles per sequence
    amplitudes: np.ndarray           # (n_subjects, shared_dim)
    phases: np.ndarray               # (n_subjects, shared_dim)
    labels: np.ndarray               # (n_subjects,)
    n_linear_modes: int = 0          # leading modes are coherent, the rest AM-coded
    class_amp_means: np.ndarray = field(default=None)  # (2, shared_dim)


def _unit_columns(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    mat = rng.normal(size=(rows, cols))
    return mat / np.linalg.norm(mat, axis=0, keepdims=True)


def _mix_view_a(z: np.ndarray) -> np.ndarray:
    return np.tanh(1.5 * z)


def _mix_view_b(z: np.ndarray) -> np.ndarray:
    return z + 0.3 * z ** 3


def generate_cohort(cfg: SynthConfig):
    """Generate a deterministic paired cohort; returns (cohort, ground_truth)."""
    rng = np.random.default_rng(cfg.seed)
    m = cfg.shared_dim
    m_lin = cfg.n_linear_modes
    q = _NUISANCE_RANK
    t_raw = cfg.frames_raw
    tgrid = np.arange(t_raw, dtype=np.float64) / (t_raw - 1)

    freqs = 1.0 + np.arange(m, dtype=np.float64)
    mode_phases = rng.uniform(0.0, 2 * np.pi, size=m)
    mix_a = _unit_columns(rng, cfg.d_a, m)
    mix_b = _unit_columns(rng, cfg.d_b, m)
    nuis_basis_a = _unit_columns(rng, cfg.d_a, q)
    nuis_basis_b = _unit_columns(rng, cfg.d_b, q)
    nuis_freq_a = rng.uniform(1.0, 4.0, size=q)
    nuis_freq_b = rng.uniform(1.0, 4.0, size=q)
    nuis_phase_a = rng.uniform(0.0, 2 * np.pi, size=q)
    nuis_phase_b = rng.uniform(0.0, 2 * np.pi, size=q)
    psi_a = np.sin(2 * np.pi * nuis_freq_a[:, None] * tgrid[None, :] + nuis_phase_a[:, None])
    psi_b = np.sin(2 * np.pi * nuis_freq_b[:, None] * tgrid[None, :] + nuis_phase_b[:, None])
    # distractor carriers share the signal carriers' frequency band so in-band
    # energy alone cannot reveal the class; their amplitudes are view-specific
    qb = _BAND_NUISANCE_RANK
    band_basis_a = _unit_columns(rng, cfg.d_a, qb)
    band_basis_b = _unit_columns(rng, cfg.d_b, qb)

    labels = np.concatenate([np.ones(cfg.n_responders, dtype=np.int64),
                             np.zeros(cfg.n_subjects - cfg.n_responders, dtype=np.int64)])
    labels = labels[rng.permutation(cfg.n_subjects)]

    delta = _AMP_CLASS_DELTA * (-1.0) ** np.arange(m)
    if not _LABEL_ON_LINEAR_MODES:
        delta[:m_lin] = 0.0
    class_means = np.stack([_AMP_MEAN - delta, _AMP_MEAN + delta])  # row y gives mean amplitudes

    amplitudes = np.empty((cfg.n_subjects, m))
    phases = np.empty((cfg.n_subjects, m))
    subjects = []
    width = len(str(cfg.n_subjects - 1))
    lo_c, hi_c = _CARRIER_BAND
    for i in range(cfg.n_subjects):
        y = int(labels[i])
        amp = rng.normal(class_means[y], _AMP_SD)
        phase = mode_phases + rng.uniform(-_PHASE_JITTER, _PHASE_JITTER, size=m)
        amplitudes[i] = amp
        phases[i] = phase

        raw = {}
        for view, mix, basis, psi, band_basis, g, d in (
                (View.A, mix_a, nuis_basis_a, psi_a, band_basis_a, _mix_view_a, cfg.d_a),
                (View.B, mix_b, nuis_basis_b, psi_b, band_basis_b, _mix_view_b, cfg.d_b)):
            x = np.zeros((d, t_raw))
            for mm in range(m_lin):
                z = amp[mm] * np.sin(2 * np.pi * freqs[mm] * tgrid + phase[mm])
                x += cfg.shared_strength * np.outer(mix[:, mm], g(z))
            for mm in range(m_lin, m):
                f_c = rng.uniform(lo_c, hi_c)
                p_c = rng.uniform(0.0, 2 * np.pi)
                carrier = np.cos(2 * np.pi * f_c * tgrid + p_c)
                x += cfg.shared_strength * amp[mm] * np.outer(mix[:, mm], carrier)
            coefs = rng.normal(size=q)
            x += _NUISANCE_SCALE * (basis @ (coefs[:, None] * psi))
            for bq in range(qb):
                f_c = rng.uniform(lo_c, hi_c)
                p_c = rng.uniform(0.0, 2 * np.pi)
                band = np.cos(2 * np.pi * f_c * tgrid + p_c)
                x += _BAND_NUISANCE_SCALE * rng.normal() * np.outer(band_basis[:, bq], band)
            x += cfg.noise_sigma * rng.normal(size=(d, t_raw))
            raw[view] = x

        sid = f"subj{i:0{width}d}"
        seq_a = resample_temporal(
            LatentSequence(raw[View.A].astype(np.float32), sid, View.A), t_out=CANONICAL_FRAMES)
        seq_b = resample_temporal(
            LatentSequence(raw[View.B].astype(np.float32), sid, View.B), t_out=CANONICAL_FRAMES)
        subjects.append(PairedSubject(sid, seq_a, seq_b, y))

    cohort = PairedCohort(tuple(subjects), cfg.d_a, cfg.d_b)
    truth = GroundTruth(mode_freqs=freqs, amplitudes=amplitudes, phases=phases,
                        labels=labels.copy(), n_linear_modes=m_lin,
                        class_amp_means=class_means)
    return cohort, truth
