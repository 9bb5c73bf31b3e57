"""Testing dataset manifests and image files"""
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
from stegogan.domain import (
    DatasetManifest,
    DomainTag,
    ManifestRecord,
    Split,
    list_images,
    load_batch,
    read_image,
    read_mask,
    unpaired_records,
    write_image,
    write_mask,
)
from stegogan.errors import ManifestError, ShapeMismatchError


def test_manifest_text_format():
    """Testing the header and tab separated records of a manifest"""
    manifest = DatasetManifest(source_dir='train/X', target_dir='train/Y',
                               records=unpaired_records(['a.png', 'b.png'], ['c.png'],
                                                        {'c.png': 'masks/c.png'}),
                               unmatchable_ratio=0.5)
    text = manifest.dumps()
    lines = text.splitlines()
    assert lines[:4] == ['split=train', 'unmatchable_ratio=0.5', 'source_dir=train/X',
                         'target_dir=train/Y']
    assert lines[4] == 'a.png\tc.png\tmasks/c.png'
    assert lines[5] == 'b.png\t-\t-'
    parsed = DatasetManifest.loads(text)
    assert parsed == manifest
    assert parsed.source_ids == ['a.png', 'b.png']
    assert parsed.target_ids == ['c.png']
    assert parsed.pairs == [('a.png', 'c.png'), ('b.png', None)]


def test_manifest_paths_resolve_against_file(tmp_path):
    """Testing resolution of relative paths against the manifest directory"""
    manifest = DatasetManifest(source_dir='X', target_dir='Y',
                               records=(ManifestRecord('a.png', 'b.png', 'm/b.png'),))
    path = os.path.join(str(tmp_path), 'sub', 'manifest.txt')
    manifest.write(path)
    loaded = DatasetManifest.read(path)
    root = os.path.join(str(tmp_path), 'sub')
    assert loaded.source_path('a.png') == os.path.join(root, 'X', 'a.png')
    assert loaded.target_path('b.png') == os.path.join(root, 'Y', 'b.png')
    assert loaded.mask_paths() == {'b.png': os.path.join(root, 'm/b.png')}


@pytest.mark.parametrize("kwargs", [
    dict(records=(ManifestRecord('a.png', None),), split=Split.TEST),
    dict(records=(ManifestRecord('a.png', 'b.png'),), unmatchable_ratio=1.5),
    dict(records=(ManifestRecord(None, None),)),
    dict(records=(ManifestRecord('a\tb.png', 'b.png'),)),
])
def test_manifest_invariants(kwargs):
    """Testing rejection of invalid manifests"""
    with pytest.raises(ManifestError):
        DatasetManifest(source_dir='X', target_dir='Y', **kwargs)


@pytest.mark.parametrize("text", [
    'split=train\nunmatchable_ratio=0.0\nsource_dir=X\n',
    'split=train\nunmatchable_ratio=0.0\nsource_dir=X\ntarget_dir=Y\na.png\tb.png\n',
    'split=valid\nunmatchable_ratio=0.0\nsource_dir=X\ntarget_dir=Y\n',
    'split=train\nseed=3\nunmatchable_ratio=0.0\nsource_dir=X\ntarget_dir=Y\n',
])
def test_malformed_manifests(text):
    """Testing parse errors of malformed manifests"""
    with pytest.raises(ManifestError):
        DatasetManifest.loads(text)


def test_image_files(tmp_path):
    """Testing image and mask files"""
    rgb = np.random.default_rng(0).integers(0, 256, size=(8, 12, 3)).astype(np.uint8)
    write_image(os.path.join(str(tmp_path), 'b.png'), rgb)
    npt.assert_array_equal(read_image(os.path.join(str(tmp_path), 'b.png')), rgb)
    mask = np.zeros((8, 12), dtype=bool)
    mask[2:4, 5] = True
    write_mask(os.path.join(str(tmp_path), 'a.png'), mask)
    npt.assert_array_equal(read_mask(os.path.join(str(tmp_path), 'a.png')), mask)
    open(os.path.join(str(tmp_path), 'notes.txt'), 'w').close()
    assert list_images(str(tmp_path)) == ['a.png', 'b.png']

    batch = load_batch([os.path.join(str(tmp_path), 'b.png')] * 2, 3, DomainTag.X)
    assert tuple(batch.shape) == (2, 3, 8, 12)
    npt.assert_allclose(batch[0, :, 0, 0].numpy(), rgb[0, 0] / 127.5 - 1.0, atol=1e-6)
    gray = load_batch([os.path.join(str(tmp_path), 'a.png')], 1)
    assert tuple(gray.shape) == (1, 1, 8, 12)


def test_batch_rejects_mixed_sizes(tmp_path):
    """Testing that batches need a common resolution"""
    write_image(os.path.join(str(tmp_path), 'a.png'), np.zeros((8, 8, 3), dtype=np.uint8))
    write_image(os.path.join(str(tmp_path), 'b.png'), np.zeros((4, 8, 3), dtype=np.uint8))
    with pytest.raises(ShapeMismatchError):
        load_batch([os.path.join(str(tmp_path), name) for name in ('a.png', 'b.png')])


if __name__ == '__main__':
    pytest.main(sys.argv)
