"""Dataset protocols operating on user-supplied imagery."""
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
import enum
import logging
import math
import os
from typing import (
    Callable,
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)
import numpy as np
from scipy import ndimage
from stegogan.domain.image_io import list_images, read_image, read_mask, write_mask
from stegogan.domain.manifest import DatasetManifest, ManifestRecord, Split, unpaired_records
from stegogan.errors import ManifestError, ShapeMismatchError

logger = logging.getLogger(__name__)

HIGHWAY_COLOR = (240, 160, 30)
HIGHWAY_TOLERANCE = 20
TOPONYM_DILATION_RADIUS = 4
TUMOR_FRACTION = 0.01

PixelDetector = Callable[[np.ndarray], np.ndarray]


def exact_count(ratio: float, total: int) -> int:
    """Number of items a ratio selects out of a total, floor(ratio * total)

    Args:
        ratio: Fraction in [0, 1]
        total: Number of items

    Returns:
        int
    """
    if not 0.0 <= ratio <= 1.0:
        raise ManifestError('ratio must lie in [0, 1], got {}'.format(ratio))
    return int(math.floor(ratio * total + 1e-9))


def detect_color_pixels(img: np.ndarray, reference: Sequence[int],
                        tolerance: float) -> np.ndarray:
    """Flag pixels whose every channel is strictly closer than tolerance to a reference colour

    Args:
        img: H x W x C image with values 0-255
        reference: Reference colour with C entries
        tolerance: Per channel distance bound (exclusive)

    Returns:
        np.ndarray: boolean H x W mask

    Raises:
        ShapeMismatchError: Channel count differs from the reference
    """
    array = np.asarray(img)
    if array.ndim != 3 or array.shape[2] != len(reference):
        raise ShapeMismatchError('Expected an H x W x {} image, got shape {}'.format(
            len(reference), array.shape))
    difference = np.abs(array.astype(np.int32) - np.asarray(reference, dtype=np.int32))
    return np.all(difference < tolerance, axis=2)


def detect_highway_pixels(map_img: np.ndarray) -> np.ndarray:
    """Flag the orange highway pixels of a rendered map

    Args:
        map_img: H x W x 3 map with values 0-255

    Returns:
        np.ndarray: boolean H x W mask
    """
    return detect_color_pixels(map_img, HIGHWAY_COLOR, HIGHWAY_TOLERANCE)


def _classify(directory: str, names: Sequence[str],
              detector: PixelDetector) -> Tuple[List[str], List[str]]:
    positive, negative = list(), list()
    for name in names:
        if bool(detector(read_image(os.path.join(directory, name), 3)).any()):
            positive.append(name)
        else:
            negative.append(name)
    return positive, negative


def _sample(rng: np.random.Generator, names: Sequence[str], count: int,
            what: str) -> List[str]:
    if count > len(names):
        raise ManifestError('Need {} {} images but only {} are available'.format(
            count, what, len(names)))
    chosen = rng.choice(len(names), size=count, replace=False)
    return sorted(names[index] for index in chosen)


def build_ratio_dataset(source_dir: str, target_dir: str, ratio: float, total: int,
                        seed: int = 0, n_sources: Optional[int] = None,
                        detector: PixelDetector = detect_highway_pixels) -> DatasetManifest:
    """Sample an unpaired training set with a fixed share of unmatchable targets

    Targets are classified by the detector (any flagged pixel marks an unmatchable map). Exactly
    floor(ratio * total) unmatchable and total minus that many clean targets are drawn without
    replacement. Sources whose same-named target is unmatchable are excluded.

    Args:
        source_dir: Domain X images
        target_dir: Domain Y images
        ratio: Share of unmatchable targets
        total: Number of targets
        seed: Sampling seed
        n_sources: Number of sources, equal to total when None
        detector: Pixel detector of the unmatchable class

    Returns:
        DatasetManifest

    Raises:
        ManifestError: Not enough images in a category
    """
    n_positive = exact_count(ratio, total)
    positive, negative = _classify(target_dir, list_images(target_dir), detector)
    logger.info('%d of %d targets contain the unmatchable class', len(positive),
                len(positive) + len(negative))
    rng = np.random.default_rng(seed)
    targets = sorted(_sample(rng, positive, n_positive, 'unmatchable target')
                     + _sample(rng, negative, total - n_positive, 'clean target'))
    excluded = set(positive)
    candidates = [name for name in list_images(source_dir) if name not in excluded]
    sources = _sample(rng, candidates, total if n_sources is None else n_sources, 'source')
    return DatasetManifest(source_dir=os.path.abspath(source_dir),
                           target_dir=os.path.abspath(target_dir),
                           records=unpaired_records(sources, targets),
                           unmatchable_ratio=n_positive / total if total else 0.0,
                           split=Split.TRAIN)


def build_paired_manifest(source_dir: str, target_dir: str,
                          detector: PixelDetector = detect_highway_pixels,
                          limit: Optional[int] = None) -> DatasetManifest:
    """Collect aligned test pairs whose target is free of the unmatchable class

    Args:
        source_dir: Domain X images
        target_dir: Domain Y images with the same file names
        detector: Pixel detector of the unmatchable class
        limit: Keep at most this many pairs, in sorted order

    Returns:
        DatasetManifest: paired test manifest
    """
    shared = sorted(set(list_images(source_dir)) & set(list_images(target_dir)))
    _, clean = _classify(target_dir, shared, detector)
    if limit is not None:
        clean = clean[:limit]
    records = tuple(ManifestRecord(name, name) for name in clean)
    return DatasetManifest(source_dir=os.path.abspath(source_dir),
                           target_dir=os.path.abspath(target_dir), records=records,
                           unmatchable_ratio=0.0, split=Split.TEST)


def _disc(radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1)
    return offsets[:, None] ** 2 + offsets[None, :] ** 2 <= radius ** 2


def derive_toponym_mask(map_with_text: np.ndarray, map_without_text: np.ndarray,
                        radius: int = TOPONYM_DILATION_RADIUS) -> np.ndarray:
    """Dilated binary difference between a map with and without labels

    Args:
        map_with_text: H x W x C map with toponyms
        map_without_text: The same map without toponyms
        radius: Radius of the disc structuring element

    Returns:
        np.ndarray: boolean H x W mask

    Raises:
        ShapeMismatchError: Images are not aligned
    """
    with_text = np.asarray(map_with_text)
    without_text = np.asarray(map_without_text)
    if with_text.shape != without_text.shape:
        raise ShapeMismatchError('Maps of shapes {} and {} are not aligned'.format(
            with_text.shape, without_text.shape))
    difference = with_text != without_text
    if difference.ndim == 3:
        difference = difference.any(axis=2)
    if not difference.any():
        return difference
    return ndimage.binary_dilation(difference, structure=_disc(radius))


def build_toponym_masks(with_dir: str, without_dir: str, out_dir: str,
                        radius: int = TOPONYM_DILATION_RADIUS) -> List[str]:
    """Derive and write the toponym mask of every map present in both directories

    Args:
        with_dir: Maps with toponyms
        without_dir: Maps without toponyms, same file names
        out_dir: Directory receiving one mask per map
        radius: Dilation radius

    Returns:
        List[str]: written mask files
    """
    written = list()
    for name in sorted(set(list_images(with_dir)) & set(list_images(without_dir))):
        mask = derive_toponym_mask(read_image(os.path.join(with_dir, name), 3),
                                   read_image(os.path.join(without_dir, name), 3), radius)
        path = os.path.join(out_dir, os.path.splitext(name)[0] + '.png')
        write_mask(path, mask)
        written.append(path)
    logger.info('Wrote %d toponym masks to %s', len(written), out_dir)
    return written


class SliceLabel(enum.Enum):
    """Category of an MRI slice."""

    TUMOROUS = 'tumorous'
    HEALTHY = 'healthy'
    EXCLUDED = 'excluded'


def label_mri_slice(tumor_mask: np.ndarray, threshold: float = TUMOR_FRACTION) -> SliceLabel:
    """Label a slice from its tumour segmentation

    Args:
        tumor_mask: Boolean segmentation
        threshold: Minimum tumorous fraction (exclusive)

    Returns:
        SliceLabel
    """
    mask = np.asarray(tumor_mask, dtype=bool)
    count = int(mask.sum())
    if count == 0:
        return SliceLabel.HEALTHY
    if count / mask.size > threshold:
        return SliceLabel.TUMOROUS
    return SliceLabel.EXCLUDED


def build_mri_dataset(t1_dir: str, flair_dir: str, mask_dir: str, ratio: float = 0.6,
                      n_source: int = 800, n_target: int = 800, n_test: int = 335,
                      seed: int = 0) -> Tuple[DatasetManifest, DatasetManifest]:
    """Build train and test manifests from extracted T1/FLAIR slices and tumour masks

    Slices are matched by file name across the three directories. The test split holds healthy
    aligned pairs; training sources are the remaining healthy T1 slices; training targets are
    FLAIR slices of which floor(ratio * n_target) are tumorous, the healthy ones disjoint from
    the sources.

    Args:
        t1_dir: T1 slices (domain X)
        flair_dir: FLAIR slices (domain Y)
        mask_dir: Tumour masks
        ratio: Share of tumorous targets
        n_source: Healthy training sources
        n_target: Training targets
        n_test: Healthy test pairs
        seed: Sampling seed

    Returns:
        Tuple[DatasetManifest, DatasetManifest]: train and test manifests

    Raises:
        ManifestError: Not enough slices in a category
    """
    names = sorted(set(list_images(t1_dir)) & set(list_images(flair_dir))
                   & set(list_images(mask_dir)))
    labels: Dict[str, SliceLabel] = {name: label_mri_slice(read_mask(os.path.join(mask_dir, name)))
                                     for name in names}
    healthy = [name for name in names if labels[name] is SliceLabel.HEALTHY]
    tumorous = [name for name in names if labels[name] is SliceLabel.TUMOROUS]
    logger.info('%d healthy, %d tumorous, %d excluded slices', len(healthy), len(tumorous),
                len(names) - len(healthy) - len(tumorous))
    rng = np.random.default_rng(seed)
    test = _sample(rng, healthy, n_test, 'healthy test')
    test_set = set(test)
    remaining = [name for name in healthy if name not in test_set]
    sources = _sample(rng, remaining, n_source, 'healthy source')
    source_set = set(sources)
    unused = [name for name in remaining if name not in source_set]
    n_tumorous = exact_count(ratio, n_target)
    targets = sorted(_sample(rng, tumorous, n_tumorous, 'tumorous target')
                     + _sample(rng, unused, n_target - n_tumorous, 'healthy target'))
    t1_dir, flair_dir = os.path.abspath(t1_dir), os.path.abspath(flair_dir)
    mask_paths = {name: os.path.abspath(os.path.join(mask_dir, name)) for name in targets}
    train_manifest = DatasetManifest(source_dir=t1_dir, target_dir=flair_dir,
                                     records=unpaired_records(sources, targets, mask_paths),
                                     unmatchable_ratio=n_tumorous / n_target if n_target else 0.0,
                                     split=Split.TRAIN)
    test_manifest = DatasetManifest(source_dir=t1_dir, target_dir=flair_dir,
                                    records=tuple(ManifestRecord(name, name) for name in test),
                                    unmatchable_ratio=0.0, split=Split.TEST)
    return train_manifest, test_manifest
