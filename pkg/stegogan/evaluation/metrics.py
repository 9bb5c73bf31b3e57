"""Image fidelity, hallucination and mask quality metrics."""
# Copyright © 2024 The stegogan developers. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
# in compliance with the License. You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software distributed under the License
# is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
# or implied. See the License for the specific language governing permissions and limitations under
# the License.
import dataclasses
from typing import (
    Callable,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)
import numpy as np
from scipy import ndimage
from stegogan.errors import ShapeMismatchError

ImageSet = Union[np.ndarray, Sequence[np.ndarray]]
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)
MIN_INSTANCE_PX = 5


def _as_list(images: ImageSet) -> List[np.ndarray]:
    # arrays of at most three dimensions are a single image
    if isinstance(images, np.ndarray) and images.ndim <= 3:
        return [images]
    return [np.asarray(image) for image in images]


def _aligned(pred: ImageSet, target: ImageSet) -> List[Tuple[np.ndarray, np.ndarray]]:
    preds, targets = _as_list(pred), _as_list(target)
    if len(preds) != len(targets):
        raise ShapeMismatchError('{} predictions for {} targets'.format(len(preds), len(targets)))
    pairs = list()
    for p, t in zip(preds, targets):
        if p.shape != t.shape:
            raise ShapeMismatchError('Prediction {} and target {} differ in shape'.format(
                p.shape, t.shape))
        pairs.append((p.astype(np.float64), t.astype(np.float64)))
    return pairs


def rmse(pred: ImageSet, target: ImageSet) -> float:
    """Root mean square error in 0-255 units, per image then averaged over the set

    Args:
        pred: Predicted image or images
        target: Aligned target image or images

    Returns:
        float

    Raises:
        ShapeMismatchError: Misaligned inputs
    """
    pairs = _aligned(pred, target)
    return float(np.mean([np.sqrt(np.mean((p - t) ** 2)) for p, t in pairs]))


def accuracy_at(pred: ImageSet, target: ImageSet, sigma: float) -> float:
    """Percentage of pixels whose every channel deviates by less than sigma

    Args:
        pred: Predicted image or images, H x W x C
        target: Aligned target image or images
        sigma: Threshold in 0-255 units

    Returns:
        float: per image percentage averaged over the set

    Raises:
        ShapeMismatchError: Misaligned inputs
        ValueError: sigma is not positive
    """
    if sigma <= 0:
        raise ValueError('sigma must be positive')
    scores = list()
    for p, t in _aligned(pred, target):
        difference = np.abs(p - t)
        if difference.ndim == 3:
            correct = np.all(difference < sigma, axis=2)
        else:
            correct = difference < sigma
        scores.append(100.0 * correct.mean())
    return float(np.mean(scores))


def false_positive_rates(generated: ImageSet, pixel_detector: Callable[[np.ndarray], np.ndarray],
                         min_instance_px: int = MIN_INSTANCE_PX) -> Tuple[float, float]:
    """Hallucination rates of an unmatchable class in generated images

    pFPR is the per image share of flagged pixels averaged over the set, in units of 1e-4.
    iFPR is the percentage of images with an 8-connected flagged component of at least
    min_instance_px pixels.

    Args:
        generated: Generated images
        pixel_detector: Maps an image to a boolean mask of unmatchable pixels
        min_instance_px: Smallest component counted as an instance

    Returns:
        Tuple[float, float]: (pFPR, iFPR)
    """
    images = _as_list(generated)
    if not images:
        return 0.0, 0.0
    pixel_rates, instances = list(), 0
    for image in images:
        flagged = np.asarray(pixel_detector(image), dtype=bool)
        pixel_rates.append(flagged.mean())
        if flagged.any():
            labels, count = ndimage.label(flagged, structure=EIGHT_CONNECTED)
            sizes = np.bincount(labels.ravel())[1:]
            if count and int(sizes.max()) >= min_instance_px:
                instances += 1
    return float(np.mean(pixel_rates) * 1e4), 100.0 * instances / len(images)


@dataclasses.dataclass(frozen=True)
class MaskScores:
    """IoU, precision and recall in percent; None where undefined."""

    iou: Optional[float]
    precision: Optional[float]
    recall: Optional[float]

    def as_tuple(self) -> Tuple[Optional[float], Optional[float], Optional[float]]:
        return self.iou, self.precision, self.recall


def mask_quality(pred_mask: np.ndarray, gt_mask: np.ndarray,
                 threshold: float = 0.5) -> MaskScores:
    """Compare a predicted unmatchable footprint with a ground-truth mask

    Args:
        pred_mask: Predicted footprint, values >= threshold count as unmatchable
        gt_mask: Boolean ground truth of the same resolution
        threshold: Binarisation threshold

    Returns:
        MaskScores: precision is None for an empty prediction, recall for an empty ground
        truth, IoU when both are empty

    Raises:
        ShapeMismatchError: Resolutions differ
    """
    pred = np.asarray(pred_mask)
    gt = np.asarray(gt_mask, dtype=bool)
    if pred.shape != gt.shape:
        raise ShapeMismatchError('Predicted mask {} and ground truth {} differ in shape'.format(
            pred.shape, gt.shape))
    pred = pred if pred.dtype == bool else pred >= threshold
    intersection = int(np.logical_and(pred, gt).sum())
    union = int(np.logical_or(pred, gt).sum())
    n_pred, n_gt = int(pred.sum()), int(gt.sum())
    return MaskScores(iou=100.0 * intersection / union if union else None,
                      precision=100.0 * intersection / n_pred if n_pred else None,
                      recall=100.0 * intersection / n_gt if n_gt else None)


def mean_mask_quality(scores: Sequence[MaskScores]) -> MaskScores:
    """Average mask scores over a set, skipping undefined entries

    Args:
        scores: Per image scores

    Returns:
        MaskScores
    """
    def mean(values: List[Optional[float]]) -> Optional[float]:
        defined = [value for value in values if value is not None]
        return float(np.mean(defined)) if defined else None

    return MaskScores(iou=mean([score.iou for score in scores]),
                      precision=mean([score.precision for score in scores]),
                      recall=mean([score.recall for score in scores]))
