"""Multi-view deep CCA toolkit with fused RBF-SVM classification.

Trains two convolutional encoder branches to maximise cross-view canonical
correlation on paired latent-sequence cohorts, fuses the projected views,
classifies with an RBF-kernel SVM, and evaluates with nested
cross-validation. A trained model supports single-view inference.
"""

__version__ = "0.1.0"

from mmcrt.errors import InputValidationError, MmcrtError, NumericalError

__all__ = ["InputValidationError", "MmcrtError", "NumericalError", "__version__"]
