"""Testing the synthetic world generator"""
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
import pytest
import sys
import os
import numpy as np
import numpy.testing as npt
from stegogan.data import (
    SyntheticWorldConfig,
    build_synthetic,
    detect_glyph_pixels,
    invert_restyle,
    random_scene,
    render_source,
    restyle,
    stamp_glyphs,
)
from stegogan.data.synthetic import UNKNOWN
from stegogan.domain import DatasetManifest, read_image, read_mask
from stegogan.errors import ConfigurationError


@pytest.fixture(scope='module')
def world(tmp_path_factory):
    cfg = SyntheticWorldConfig(resolution=28, n_train_per_domain=300, n_test_pairs=10,
                               unmatchable_ratio=0.4, shapes_per_image=3, seed=7)
    return build_synthetic(cfg, str(tmp_path_factory.mktemp('synthetic')))


def test_exact_glyph_count(world):
    """Testing that exactly floor(ratio * n) targets carry glyphs"""
    manifest = world.train_manifest
    assert len(world.glyph_targets) == 120
    detected = [name for name in manifest.target_ids
                if detect_glyph_pixels(read_image(manifest.target_path(name))).any()]
    assert sorted(detected) == sorted(world.glyph_targets)
    masks = manifest.mask_paths()
    for name in manifest.target_ids:
        mask = read_mask(masks[name])
        npt.assert_array_equal(mask, detect_glyph_pixels(read_image(manifest.target_path(name))))


def test_restyle_is_invertible_outside_glyphs(world):
    """Testing that the domain Y rendering keeps the scene recoverable"""
    manifest = world.train_manifest
    masks = manifest.mask_paths()
    with np.load(world.scenes_path) as scenes:
        for name in manifest.target_ids:
            glyphs = read_mask(masks[name])
            recovered = invert_restyle(read_image(manifest.target_path(name)), exclude=glyphs)
            expected = np.where(glyphs, UNKNOWN, scenes['train_' + name])
            npt.assert_array_equal(recovered, expected)


def test_test_pairs_share_scenes(world):
    """Testing that test pairs render the same glyph-free scene in both domains"""
    manifest = world.test_manifest
    assert len(manifest.pairs) == 10
    with np.load(world.scenes_path) as scenes:
        for source, target in manifest.pairs:
            scene = scenes['test_' + target]
            npt.assert_array_equal(read_image(manifest.source_path(source)),
                                   render_source(scene))
            y = read_image(manifest.target_path(target))
            npt.assert_array_equal(y, restyle(scene))
            assert not detect_glyph_pixels(y).any()


def test_ratio_zero_has_no_glyphs(tmp_path):
    """Testing a world without unmatchable content"""
    cfg = SyntheticWorldConfig(resolution=28, n_train_per_domain=12, n_test_pairs=2,
                               unmatchable_ratio=0.0)
    dataset = build_synthetic(cfg, str(tmp_path))
    assert dataset.glyph_targets == ()
    for path in dataset.train_manifest.mask_paths().values():
        assert not read_mask(path).any()


@pytest.mark.parametrize("n, ratio, flagged", [
    (10, 0.33, 3),
    (7, 0.5, 3),
    (9, 0.99, 8),
])
def test_manifest_ratio_is_realised_fraction(tmp_path, n, ratio, flagged):
    """Testing that the train manifest records the fraction of glyph targets actually drawn"""
    cfg = SyntheticWorldConfig(resolution=32, n_train_per_domain=n, n_test_pairs=1,
                               unmatchable_ratio=ratio)
    dataset = build_synthetic(cfg, str(tmp_path))
    assert len(dataset.glyph_targets) == flagged
    assert dataset.train_manifest.unmatchable_ratio == flagged / n
    stored = DatasetManifest.read(dataset.train_manifest_path)
    assert stored.unmatchable_ratio == flagged / n
    masks = stored.mask_paths()
    assert sum(read_mask(masks[name]).any() for name in stored.target_ids) == flagged


def test_worlds_are_reproducible(tmp_path):
    """Testing byte identical manifests and images for equal seeds"""
    cfg = SyntheticWorldConfig(resolution=28, n_train_per_domain=10, n_test_pairs=3,
                               unmatchable_ratio=0.5, seed=3)
    first = build_synthetic(cfg, str(tmp_path / 'first'))
    second = build_synthetic(cfg, str(tmp_path / 'second'))
    for name in ('train_manifest_path', 'test_manifest_path'):
        with open(getattr(first, name), 'rb') as a, open(getattr(second, name), 'rb') as b:
            assert a.read() == b.read()
    for target in first.train_manifest.target_ids:
        npt.assert_array_equal(read_image(first.train_manifest.target_path(target)),
                               read_image(second.train_manifest.target_path(target)))
    with pytest.raises(FileExistsError):
        build_synthetic(cfg, str(tmp_path / 'first'))
    build_synthetic(cfg, str(tmp_path / 'first'), overwrite=True)


def test_stamp_glyphs():
    """Testing the glyph mask and colour"""
    rng = np.random.default_rng(0)
    image = restyle(random_scene(rng, 32, 3))
    stamped, mask = stamp_glyphs(image, rng, 3)
    assert mask.any()
    npt.assert_array_equal(detect_glyph_pixels(stamped), mask)
    npt.assert_array_equal(stamped[~mask], image[~mask])
    assert not detect_glyph_pixels(image).any()


@pytest.mark.parametrize("config", [
    {'resolution': 16},
    {'unmatchable_ratio': 1.5},
    {'n_train_per_domain': -1},
    {'glyph_density': 0},
])
def test_invalid_world(config):
    """Testing rejection of invalid synthetic worlds"""
    with pytest.raises(ConfigurationError):
        SyntheticWorldConfig.from_config(config)


if __name__ == '__main__':
    pytest.main(sys.argv)
