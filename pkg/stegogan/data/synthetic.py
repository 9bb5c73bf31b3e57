"""Synthetic non-bijective benchmark of geometric scenes with unmatchable glyphs."""
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
import logging
import os
from typing import (
    Dict,
    Optional,
    Tuple,
)
import numpy as np
from scipy import ndimage
from stegogan.config import ConfigMixin, config_field
from stegogan.data.protocols import detect_color_pixels, exact_count
from stegogan.domain.image_io import write_image, write_mask
from stegogan.domain.manifest import DatasetManifest, ManifestRecord, Split, unpaired_records
from stegogan.errors import ConfigurationError

logger = logging.getLogger(__name__)

BACKGROUND = 0
CIRCLE = 1
RECTANGLE = 2
UNKNOWN = 255

# Domain X: two-tone checkered background, flat shapes
X_TEXTURE = ((182, 170, 150), (158, 146, 126))
X_FILL = {CIRCLE: (200, 60, 60), RECTANGLE: (60, 120, 200)}
TEXTURE_PERIOD = 4

# Domain Y: flat background, recoloured shapes with a class specific outline
Y_FILL = {BACKGROUND: (236, 234, 224), CIRCLE: (96, 172, 96), RECTANGLE: (232, 200, 72)}
Y_OUTLINE = {CIRCLE: (40, 92, 40), RECTANGLE: (150, 118, 22)}

GLYPH_COLOR = (250, 0, 250)
GLYPH_TOLERANCE = 20
GLYPH_SIZE = 7
GLYPH_ARM = 2

TRAIN_MANIFEST = 'train_manifest.txt'
TEST_MANIFEST = 'test_manifest.txt'
SCENES_FILE = 'scenes.npz'


@dataclasses.dataclass(frozen=True)
class SyntheticWorldConfig(ConfigMixin):
    """Size and content of a synthetic world."""

    resolution: int = config_field(64, 'Side length of the square images')
    n_train_per_domain: int = config_field(300, 'Training images per domain')
    n_test_pairs: int = config_field(50, 'Paired glyph-free test images')
    unmatchable_ratio: float = config_field(0.4, 'Share of domain Y training images with glyphs')
    glyph_density: int = config_field(2, 'Glyphs stamped on each glyph-bearing image')
    shapes_per_image: int = config_field(4, 'Circles and rectangles per scene')
    seed: int = config_field(0, 'Seed of every random choice')

    def __post_init__(self) -> None:
        if not 0.0 <= self.unmatchable_ratio <= 1.0:
            raise ConfigurationError('unmatchable_ratio must lie in [0, 1]')
        if self.resolution < 4 * GLYPH_SIZE:
            raise ConfigurationError('resolution must be at least {}'.format(4 * GLYPH_SIZE))
        if self.n_train_per_domain < 0 or self.n_test_pairs < 0:
            raise ConfigurationError('Image counts must be non-negative')
        if self.glyph_density < 1 or self.shapes_per_image < 0:
            raise ConfigurationError(
                'glyph_density must be positive and shapes_per_image non-negative')


@dataclasses.dataclass(frozen=True)
class SyntheticDataset:
    """Result of :func:`build_synthetic`."""

    root: str
    train_manifest: DatasetManifest
    test_manifest: DatasetManifest
    glyph_targets: Tuple[str, ...]

    @property
    def train_manifest_path(self) -> str:
        return os.path.join(self.root, TRAIN_MANIFEST)

    @property
    def test_manifest_path(self) -> str:
        return os.path.join(self.root, TEST_MANIFEST)

    @property
    def scenes_path(self) -> str:
        return os.path.join(self.root, SCENES_FILE)


def random_scene(rng: np.random.Generator, resolution: int, n_shapes: int) -> np.ndarray:
    """Draw a label map of circles and rectangles on background

    Args:
        rng: Random number generator
        resolution: Side length
        n_shapes: Number of shapes, later ones paint over earlier ones

    Returns:
        np.ndarray: H x W uint8 labels
    """
    scene = np.full((resolution, resolution), BACKGROUND, dtype=np.uint8)
    rows, cols = np.mgrid[0:resolution, 0:resolution]
    low, high = max(3, resolution // 12), max(4, resolution // 5)
    for _ in range(n_shapes):
        size = int(rng.integers(low, high + 1))
        center_row, center_col = (int(value) for value in rng.integers(0, resolution, size=2))
        if rng.random() < 0.5:
            inside = (rows - center_row) ** 2 + (cols - center_col) ** 2 <= size ** 2
            scene[inside] = CIRCLE
        else:
            half_height = int(rng.integers(low, high + 1))
            scene[max(0, center_row - half_height):center_row + half_height + 1,
                  max(0, center_col - size):center_col + size + 1] = RECTANGLE
    return scene


def render_source(scene: np.ndarray) -> np.ndarray:
    """Render a scene in domain X style

    Args:
        scene: Label map

    Returns:
        np.ndarray: H x W x 3 uint8
    """
    rows, cols = np.indices(scene.shape)
    checker = ((rows // TEXTURE_PERIOD + cols // TEXTURE_PERIOD) % 2).astype(bool)
    image = np.where(checker[:, :, None], np.asarray(X_TEXTURE[1], dtype=np.uint8),
                     np.asarray(X_TEXTURE[0], dtype=np.uint8))
    for label, color in X_FILL.items():
        image[scene == label] = color
    return image


def outline_mask(scene: np.ndarray) -> np.ndarray:
    """Shape pixels with a 4-neighbour of another label

    Args:
        scene: Label map

    Returns:
        np.ndarray: boolean H x W mask
    """
    cross = ndimage.generate_binary_structure(2, 1)
    outline = np.zeros(scene.shape, dtype=bool)
    for label in (CIRCLE, RECTANGLE):
        region = scene == label
        outline |= region & ~ndimage.binary_erosion(region, structure=cross, border_value=1)
    return outline


def restyle(scene: np.ndarray) -> np.ndarray:
    """Render a scene in domain Y style: palette remap plus outlines

    Args:
        scene: Label map

    Returns:
        np.ndarray: H x W x 3 uint8
    """
    image = np.zeros(scene.shape + (3,), dtype=np.uint8)
    for label, color in Y_FILL.items():
        image[scene == label] = color
    outline = outline_mask(scene)
    for label, color in Y_OUTLINE.items():
        image[outline & (scene == label)] = color
    return image


def invert_restyle(image: np.ndarray, exclude: Optional[np.ndarray] = None) -> np.ndarray:
    """Recover the label map of a domain Y image

    Args:
        image: H x W x 3 domain Y image
        exclude: Pixels to skip, e.g. glyphs

    Returns:
        np.ndarray: label map, UNKNOWN where excluded or the colour is not in the palette
    """
    scene = np.full(image.shape[:2], UNKNOWN, dtype=np.uint8)
    colors = list(Y_FILL.items()) + list(Y_OUTLINE.items())
    for label, color in colors:
        scene[np.all(image == np.asarray(color, dtype=image.dtype), axis=2)] = label
    if exclude is not None:
        scene[np.asarray(exclude, dtype=bool)] = UNKNOWN
    return scene


def glyph_stencil() -> np.ndarray:
    """Boolean GLYPH_SIZE x GLYPH_SIZE cross with GLYPH_ARM wide arms"""
    stencil = np.zeros((GLYPH_SIZE, GLYPH_SIZE), dtype=bool)
    start = (GLYPH_SIZE - GLYPH_ARM) // 2
    stencil[start:start + GLYPH_ARM, :] = True
    stencil[:, start:start + GLYPH_ARM] = True
    return stencil


def stamp_glyphs(image: np.ndarray, rng: np.random.Generator,
                 count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Paint cross glyphs at random positions

    Args:
        image: H x W x 3 image, not modified
        rng: Random number generator
        count: Number of glyphs

    Returns:
        Tuple[np.ndarray, np.ndarray]: stamped image and boolean glyph mask
    """
    stamped = image.copy()
    mask = np.zeros(image.shape[:2], dtype=bool)
    stencil = glyph_stencil()
    for _ in range(count):
        row, col = (int(value) for value in
                    rng.integers(0, np.asarray(image.shape[:2]) - GLYPH_SIZE + 1))
        mask[row:row + GLYPH_SIZE, col:col + GLYPH_SIZE] |= stencil
    stamped[mask] = GLYPH_COLOR
    return stamped, mask


def detect_glyph_pixels(img: np.ndarray) -> np.ndarray:
    """Flag glyph coloured pixels

    Args:
        img: H x W x 3 image with values 0-255

    Returns:
        np.ndarray: boolean H x W mask
    """
    return detect_color_pixels(img, GLYPH_COLOR, GLYPH_TOLERANCE)


def build_synthetic(cfg: SyntheticWorldConfig, out_dir: str,
                    overwrite: bool = False) -> SyntheticDataset:
    """Generate images, glyph masks and manifests of a synthetic world

    Domain X renders scenes with a textured background; domain Y restyles independent scenes,
    and exactly floor(unmatchable_ratio * n_train_per_domain) of them carry glyphs. The test
    split pairs both renderings of shared scenes and holds no glyphs. Label maps of every
    domain Y image are kept in ``scenes.npz`` under ``train_<id>`` and ``test_<id>``.

    Args:
        cfg: World configuration
        out_dir: Output directory
        overwrite: Allow a non-empty output directory

    Returns:
        SyntheticDataset

    Raises:
        FileExistsError: Output directory not empty, aborting.
                         Use overwrite=True to replace its contents.
    """
    root = os.path.abspath(os.path.expanduser(out_dir))
    if os.path.isdir(root) and os.listdir(root) and overwrite is not True:
        raise FileExistsError(
            'Output directory {} is not empty, aborting. Use overwrite to replace'.format(root))
    x_rng, y_rng, glyph_rng, test_rng = (np.random.default_rng(child) for child in
                                         np.random.SeedSequence(cfg.seed).spawn(4))
    n = cfg.n_train_per_domain
    width = max(4, len(str(max(n, cfg.n_test_pairs))))
    glyph_indices = set(int(index) for index in glyph_rng.choice(
        n, size=exact_count(cfg.unmatchable_ratio, n), replace=False)) if n else set()

    scenes: Dict[str, np.ndarray] = dict()
    source_ids, target_ids, mask_paths, glyph_targets = list(), list(), dict(), list()
    for index in range(n):
        source_id = 'x_{:0{}d}.png'.format(index, width)
        write_image(os.path.join(root, 'train', 'X', source_id),
                    render_source(random_scene(x_rng, cfg.resolution, cfg.shapes_per_image)))
        source_ids.append(source_id)

        target_id = 'y_{:0{}d}.png'.format(index, width)
        scene = random_scene(y_rng, cfg.resolution, cfg.shapes_per_image)
        image = restyle(scene)
        mask = np.zeros(scene.shape, dtype=bool)
        if index in glyph_indices:
            image, mask = stamp_glyphs(image, glyph_rng, cfg.glyph_density)
            glyph_targets.append(target_id)
        write_image(os.path.join(root, 'train', 'Y', target_id), image)
        mask_path = os.path.join('train', 'masks', target_id)
        write_mask(os.path.join(root, mask_path), mask)
        mask_paths[target_id] = mask_path
        target_ids.append(target_id)
        scenes['train_' + target_id] = scene

    test_records = list()
    for index in range(cfg.n_test_pairs):
        name = 't_{:0{}d}.png'.format(index, width)
        scene = random_scene(test_rng, cfg.resolution, cfg.shapes_per_image)
        write_image(os.path.join(root, 'test', 'X', name), render_source(scene))
        write_image(os.path.join(root, 'test', 'Y', name), restyle(scene))
        test_records.append(ManifestRecord(name, name))
        scenes['test_' + name] = scene

    train_manifest = DatasetManifest(source_dir=os.path.join('train', 'X'),
                                     target_dir=os.path.join('train', 'Y'),
                                     records=unpaired_records(source_ids, target_ids,
                                                              mask_paths),
                                     unmatchable_ratio=len(glyph_targets) / n if n else 0.0,
                                     split=Split.TRAIN, root=root)
    test_manifest = DatasetManifest(source_dir=os.path.join('test', 'X'),
                                    target_dir=os.path.join('test', 'Y'),
                                    records=tuple(test_records), unmatchable_ratio=0.0,
                                    split=Split.TEST, root=root)
    dataset = SyntheticDataset(root=root, train_manifest=train_manifest,
                               test_manifest=test_manifest, glyph_targets=tuple(glyph_targets))
    train_manifest.write(dataset.train_manifest_path)
    test_manifest.write(dataset.test_manifest_path)
    np.savez_compressed(dataset.scenes_path, **scenes)
    logger.info('Synthetic world in %s: %d images per domain, %d with glyphs, %d test pairs',
                root, n, len(glyph_targets), cfg.n_test_pairs)
    return dataset
