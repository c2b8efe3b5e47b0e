"""Training side of the coupled-latent-space toolkit.

Trains a generator/encoder pair (adversarial route with a code-recovery
regularizer, or a truncated-SVD linear baseline) and exports both networks
as gmfoo-net-v1 JSON for the optimizer package to consume. The JSON format
is the only contract between the two packages.
"""

from gmfoo_trainer.config import DISC_DATASET, TrainerConfig, load_trainer_config
from gmfoo_trainer.data import IMAGE_SIDE, disc_images, load_curve_corpus
from gmfoo_trainer.errors import (
    ConfigError,
    DataError,
    TrainerError,
    TrainingDiverged,
)
from gmfoo_trainer.gan import TrainReport, code_recovery, train_mfoo_gan
from gmfoo_trainer.netio import (
    ACTIVATIONS,
    NETWORK_FORMAT,
    layer_doc,
    network_doc,
    save_doc,
)
from gmfoo_trainer.svd import SvdResult, train_svd

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "ConfigError",
    "DISC_DATASET",
    "DataError",
    "IMAGE_SIDE",
    "NETWORK_FORMAT",
    "SvdResult",
    "TrainReport",
    "TrainerConfig",
    "TrainerError",
    "TrainingDiverged",
    "code_recovery",
    "disc_images",
    "layer_doc",
    "load_curve_corpus",
    "load_trainer_config",
    "network_doc",
    "save_doc",
    "train_mfoo_gan",
    "train_svd",
]
