"""srprune: loss-value-based dataset pruning for image super-resolution."""

from .imgcore import (
    ResampleSpec,
    bicubic_resize,
    conv2d,
    load_png,
    mse,
    psnr,
    rgb_to_y,
    save_png,
    sobel_magnitude,
    ssim,
)
from .scoring import SamplePair, ScoreTable, score_dataset, score_dataset_sobel, score_sample_loss
from .selection import (
    CoreSetManifest,
    SelectionSpec,
    cdf_export,
    coreset_size,
    select_ascending,
    select_descending,
    select_random,
    select_refined,
)
from .srcnn import SrcnnWeights, TrainConfig, init_weights, load_weights, save_weights, srcnn_forward, train

__version__ = "0.1.0"
