"""Deep CCA training: minibatch ascent on the total-correlation objective over
two encoder branches, then a full-training-set linear CCA refit to pin down
the projection matrices and means.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from mmcrt.errors import InputValidationError, NumericalError
from mmcrt.cca.linear import CcaConfig, cca_gradient, cca_objective, linear_cca
from mmcrt.dataset.types import PairedCohort, View
from mmcrt.nn import snapshot
from mmcrt.nn.adam import OptimState, adam_step
from mmcrt.nn.encoder import (EncoderParams, effective_k, encoder_backward_batch,
                              encoder_forward_batch, init_encoder_params)


@dataclass(frozen=True)
class TrainConfig:
    """Ascent hyperparameters.

    ``batch_r`` scales the minibatch covariance ridge relative to the mean
    feature variance of the batch. A fixed small ridge lets the encoders
    saturate the rank-limited batch objective by inflating output scale
    (batches of 10 with k up to 32 outputs are always perfectly correlated
    in-sample), which kills the learning signal; tying the ridge to the
    feature scale keeps gradients informative.
    """

    lr: float
    epochs: int = 500
    batch: int = 10
    batch_r: float = 0.5

    def __post_init__(self):
        if self.lr <= 0:
            raise InputValidationError(f"lr must be positive, got {self.lr}")
        if self.epochs < 1:
            raise InputValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch < 2:
            raise InputValidationError(f"batch must be >= 2, got {self.batch}")
        if self.batch_r <= 0:
            raise InputValidationError(f"batch_r must be positive, got {self.batch_r}")


@dataclass
class DccaModel:
    """Two trained encoder branches plus fitted projections and means."""

    params_a: EncoderParams
    params_b: EncoderParams
    proj_a: np.ndarray        # (k, k) projection for view A encoder outputs
    proj_b: np.ndarray
    mean_a: np.ndarray        # (k,) training means of encoder outputs
    mean_b: np.ndarray
    rho: np.ndarray           # fitted canonical correlations
    config: CcaConfig
    input_dims: tuple         # (d_a, d_b, frames)
    history: list = field(default_factory=list, repr=False)  # per-epoch mean objective

    @property
    def k(self) -> int:
        return self.proj_a.shape[1]


def _cohort_tensors(cohort: PairedCohort):
    xa = np.stack([s.view_a.values for s in cohort.subjects])
    xb = np.stack([s.view_b.values for s in cohort.subjects])
    return torch.from_numpy(xa), torch.from_numpy(xb)


def _encode_all(params: EncoderParams, x: torch.Tensor, chunk: int = 256) -> np.ndarray:
    """Full-precision encoding for projection fitting and inference.

    Whitening projections amplify float32 jitter (their norms scale inversely
    with covariance eigenvalues), so everything downstream of training runs
    the encoder in float64.
    """
    params64 = params.astype(np.float64)
    x = x.to(torch.float64)
    outs = []
    for i in range(0, x.shape[0], chunk):
        out, _ = encoder_forward_batch(params64, x[i:i + chunk])
        outs.append(out.numpy())
    return np.concatenate(outs, axis=0)


def train_dcca(cohort: PairedCohort, cfg: CcaConfig, train_cfg: TrainConfig,
               seed: int) -> DccaModel:
    """Train both branches by Adam ascent on the minibatch CCA objective, then
    fit projections on the full training set. Deterministic given ``seed``."""
    if len(cohort) < train_cfg.batch:
        raise InputValidationError(
            f"cohort has {len(cohort)} subjects, smaller than batch {train_cfg.batch}")
    frames = cohort.subjects[0].view_a.n_frames
    k = effective_k(cfg.k)
    # after capping, k must still fit the encoder output dimensions
    run_cfg = CcaConfig(k, cfg.r)
    if cfg.r <= 0 and train_cfg.batch <= k:
        raise InputValidationError(
            f"r must be positive when batch ({train_cfg.batch}) <= k ({k})")

    rng = np.random.default_rng(seed)
    params_a = init_encoder_params((cohort.d_a, frames), k, rng)
    params_b = init_encoder_params((cohort.d_b, frames), k, rng)
    state_a = OptimState(lr=train_cfg.lr)
    state_b = OptimState(lr=train_cfg.lr)
    xa, xb = _cohort_tensors(cohort)
    n = len(cohort)

    history = []
    for epoch in range(train_cfg.epochs):
        order = rng.permutation(n)
        epoch_obj = []
        for start in range(0, n, train_cfg.batch):
            idx = order[start:start + train_cfg.batch]
            if idx.size < 2:
                continue
            try:
                ha, cache_a = encoder_forward_batch(params_a, xa[idx])
                hb, cache_b = encoder_forward_batch(params_b, xb[idx])
                h1 = ha.numpy().astype(np.float64)
                h2 = hb.numpy().astype(np.float64)
                scale = 0.5 * (h1.var(axis=0, ddof=1).mean() + h2.var(axis=0, ddof=1).mean())
                batch_cfg = CcaConfig(k, max(train_cfg.batch_r * scale, 1e-8))
                obj = cca_objective(h1, h2, batch_cfg)
                g1, g2 = cca_gradient(h1, h2, batch_cfg)
                # ascend: feed the negated correlation gradient to Adam (a minimizer)
                da = torch.from_numpy(-g1).to(ha.dtype)
                db = torch.from_numpy(-g2).to(hb.dtype)
                grads_a, _ = encoder_backward_batch(params_a, cache_a, da, need_dx=False)
                grads_b, _ = encoder_backward_batch(params_b, cache_b, db, need_dx=False)
                params_a.set_tensors(adam_step(state_a, params_a.tensors(), grads_a))
                params_b.set_tensors(adam_step(state_b, params_b.tensors(), grads_b))
            except NumericalError as exc:
                raise NumericalError(
                    f"DCCA training failed at epoch {epoch}, batch {start // train_cfg.batch}: {exc}"
                ) from exc
            epoch_obj.append(obj)
        history.append(float(np.mean(epoch_obj)) if epoch_obj else 0.0)

    h1_full = _encode_all(params_a, xa)
    h2_full = _encode_all(params_b, xb)
    a1, a2, rho, (m1, m2) = linear_cca(h1_full, h2_full, k, run_cfg.r)
    return DccaModel(params_a, params_b, a1, a2, m1, m2, rho, run_cfg,
                     (cohort.d_a, cohort.d_b, frames), history)


def project(model: DccaModel, seq, view) -> np.ndarray:
    """Canonical vector for one latent sequence: V = A^T (f(x) - mean)."""
    view = View.parse(view)
    params = model.params_a if view is View.A else model.params_b
    values = seq.values if hasattr(seq, "values") else np.asarray(seq)
    want_d = model.input_dims[0] if view is View.A else model.input_dims[1]
    if values.shape != (want_d, model.input_dims[2]):
        raise InputValidationError(
            f"view {view.value} expects shape {(want_d, model.input_dims[2])}, got {values.shape}")
    h = _encode_all(params, torch.from_numpy(np.array(values))[None, :, :])[0]
    proj = model.proj_a if view is View.A else model.proj_b
    mean = model.mean_a if view is View.A else model.mean_b
    return proj.T @ (h - mean)


def project_cohort(model: DccaModel, cohort: PairedCohort, view) -> np.ndarray:
    """Stacked canonical vectors (n, k) for one view of a cohort."""
    view = View.parse(view)
    params = model.params_a if view is View.A else model.params_b
    mats = np.stack([s.sequence(view).values for s in cohort.subjects])
    h = _encode_all(params, torch.from_numpy(mats))
    proj = model.proj_a if view is View.A else model.proj_b
    mean = model.mean_a if view is View.A else model.mean_b
    return (h - mean) @ proj


# --- snapshot ---------------------------------------------------------------
# MMW1 tensor stream, in declared order: 14 view-A encoder tensors, 14 view-B
# encoder tensors, proj_a, proj_b, mean_a, mean_b, then a metadata vector
# [k, r, d_a, d_b, frames].

def dcca_to_bytes(model: DccaModel) -> bytes:
    meta = np.array([model.k, model.config.r, *model.input_dims], dtype=np.float32)
    tensors = (model.params_a.tensors() + model.params_b.tensors()
               + [model.proj_a, model.proj_b, model.mean_a, model.mean_b,
                  model.rho, meta])
    return snapshot.pack_tensors(tensors)


def dcca_from_bytes(blob: bytes, offset: int = 0):
    tensors, offset = snapshot.unpack_tensors(blob, offset)
    if len(tensors) < 2 * 14 + 6:
        raise InputValidationError("model snapshot is missing tensors")
    meta = tensors[-1]
    k = int(meta[0])
    r = float(meta[1])
    d_a, d_b, frames = int(meta[2]), int(meta[3]), int(meta[4])

    def build_params(ts, shape):
        conv_w = [torch.from_numpy(np.array(ts[2 * i])) for i in range(6)]
        conv_b = [torch.from_numpy(np.array(ts[2 * i + 1])) for i in range(6)]
        return EncoderParams(conv_w, conv_b, torch.from_numpy(np.array(ts[12])),
                             torch.from_numpy(np.array(ts[13])), shape, k)

    params_a = build_params(tensors[0:14], (d_a, frames))
    params_b = build_params(tensors[14:28], (d_b, frames))
    proj_a, proj_b, mean_a, mean_b, rho = [np.array(t, dtype=np.float64)
                                           for t in tensors[28:33]]
    model = DccaModel(params_a, params_b, proj_a, proj_b, mean_a, mean_b, rho,
                      CcaConfig(k, r), (d_a, d_b, frames))
    return model, offset


def save_dcca(model: DccaModel, path) -> None:
    Path(path).write_bytes(dcca_to_bytes(model))


def load_dcca(path) -> DccaModel:
    model, _ = dcca_from_bytes(Path(path).read_bytes())
    return model
