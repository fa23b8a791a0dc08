from mmcrt.dataset.types import (CANONICAL_FRAMES, LatentSequence, PairedCohort,
                                 PairedSubject, View)
from mmcrt.dataset.io import load_cohort, read_matrix, write_cohort, write_matrix
from mmcrt.dataset.resample import resample_temporal
from mmcrt.dataset.augment import (AugmentParams, augment, augment_matrix, flip_matrix,
                                   rotate_matrix, scale_matrix, translate_matrix)
from mmcrt.dataset.synth import GroundTruth, SynthConfig, generate_cohort

__all__ = [
    "CANONICAL_FRAMES", "LatentSequence", "PairedCohort", "PairedSubject", "View",
    "load_cohort", "read_matrix", "write_cohort", "write_matrix",
    "resample_temporal",
    "AugmentParams", "augment", "augment_matrix", "flip_matrix", "rotate_matrix",
    "scale_matrix", "translate_matrix",
    "GroundTruth", "SynthConfig", "generate_cohort",
]
