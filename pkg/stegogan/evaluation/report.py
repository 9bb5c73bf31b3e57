"""Directory level evaluation and metric reports."""
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
import logging
import os
from typing import (
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)
from stegogan.data.protocols import PixelDetector, detect_highway_pixels
from stegogan.data.synthetic import detect_glyph_pixels
from stegogan.domain.image_io import list_images, read_image, read_mask
from stegogan.errors import ConfigurationError, ShapeMismatchError
from stegogan.evaluation.feature_distance import FeatureExtractor, fid_kid
from stegogan.evaluation.metrics import (
    MIN_INSTANCE_PX,
    accuracy_at,
    false_positive_rates,
    mask_quality,
    mean_mask_quality,
    rmse,
)

logger = logging.getLogger(__name__)

METRICS = ('rmse', 'acc', 'fpr', 'fid', 'kid', 'mask')
DETECTORS: Dict[str, PixelDetector] = {
    'highway': detect_highway_pixels,
    'glyph': detect_glyph_pixels,
}


def _matching_names(pred_dir: str, target_dir: str) -> List[str]:
    names = list_images(pred_dir)
    available = set(list_images(target_dir))
    missing = [name for name in names if name not in available]
    if missing:
        raise ShapeMismatchError('No target for {} predictions, e.g. {}'.format(
            len(missing), missing[0]))
    return names


def evaluate_directories(pred_dir: str, target_dir: str, metrics: Sequence[str] = METRICS,
                         sigmas: Tuple[float, float] = (5.0, 10.0), detector: str = 'highway',
                         min_instance_px: int = MIN_INSTANCE_PX,
                         pred_mask_dir: Optional[str] = None, gt_mask_dir: Optional[str] = None,
                         feature_extractor: Optional[FeatureExtractor] = None,
                         channels: int = 3) -> Dict[str, Optional[float]]:
    """Compute the requested metrics of predictions against same-named targets

    Args:
        pred_dir: Generated images
        target_dir: Reference images with the same file names
        metrics: Subset of METRICS
        sigmas: Accuracy thresholds
        detector: Key of DETECTORS used for pFPR and iFPR
        min_instance_px: Smallest counted instance
        pred_mask_dir: Predicted footprints, required for 'mask'
        gt_mask_dir: Ground-truth masks, required for 'mask'
        feature_extractor: FID/KID embedding, the seeded default when None
        channels: Channels images are read with

    Returns:
        Dict[str, Optional[float]]: metric name to value, None where undefined

    Raises:
        ConfigurationError: Unknown metric or detector, missing mask directories
    """
    unknown = [metric for metric in metrics if metric not in METRICS]
    if unknown:
        raise ConfigurationError('Unknown metrics {}, choose from {}'.format(unknown, METRICS))
    if detector not in DETECTORS:
        raise ConfigurationError('Unknown detector {}'.format(detector))
    names = _matching_names(pred_dir, target_dir)
    preds = [read_image(os.path.join(pred_dir, name), channels) for name in names]
    targets = [read_image(os.path.join(target_dir, name), channels) for name in names]
    logger.info('Evaluating %d images of %s', len(names), pred_dir)
    values: Dict[str, Optional[float]] = dict()
    if 'rmse' in metrics:
        values['rmse'] = rmse(preds, targets)
    if 'acc' in metrics:
        for sigma in sigmas:
            values['acc@{:g}'.format(sigma)] = accuracy_at(preds, targets, sigma)
    if 'fpr' in metrics:
        values['pfpr'], values['ifpr'] = false_positive_rates(preds, DETECTORS[detector],
                                                              min_instance_px)
    if 'fid' in metrics or 'kid' in metrics:
        distances = fid_kid(targets, preds, feature_extractor)
        if 'fid' in metrics:
            values['fid'] = distances.fid
        if 'kid' in metrics:
            values['kid'] = distances.kid
    if 'mask' in metrics:
        if pred_mask_dir is None or gt_mask_dir is None:
            raise ConfigurationError('The mask metric needs predicted and ground-truth masks')
        mask_names = _matching_names(pred_mask_dir, gt_mask_dir)
        scores = mean_mask_quality([
            mask_quality(read_image(os.path.join(pred_mask_dir, name), 1)[:, :, 0] / 255.0,
                         read_mask(os.path.join(gt_mask_dir, name)))
            for name in mask_names])
        values['miou'], values['precision'], values['recall'] = scores.as_tuple()
    return values


def format_report(values: Mapping[str, Optional[float]]) -> List[str]:
    """One ``metric=value`` line per metric, n/a for undefined values"""
    return ['{}={}'.format(name, 'n/a' if value is None else '{:.6f}'.format(value))
            for name, value in values.items()]


def write_report(values: Mapping[str, Optional[float]], path: str) -> None:
    """Write a metric report

    Args:
        values: Metric values
        path: Report file
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as fo:
        fo.writelines(line + '\n' for line in format_report(values))
