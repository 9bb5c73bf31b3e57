"""Testing value types and hyperparameters"""
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
import numpy as np
import numpy.testing as npt
import torch
from stegogan.domain import (
    DATASET_PRESETS,
    DomainTag,
    Hyperparameters,
    ImageTensor,
    TranslationBundle,
    denormalize_image,
    normalize_image,
)
from stegogan.errors import ConfigurationError, ShapeMismatchError


@pytest.mark.parametrize("raw, expected", [
    (0, -1.0),
    (255, 1.0),
    (128, 128 / 127.5 - 1.0),
])
def test_normalize_values(raw, expected):
    """Testing the affine map of 8-bit values to [-1, 1]"""
    image = normalize_image(np.full((2, 3, 3), raw, dtype=np.uint8))
    assert image.shape == (3, 2, 3)
    npt.assert_allclose(image.data, expected, atol=1e-12)


def test_normalize_denormalize_every_level():
    """Testing that every 8-bit level survives normalisation"""
    levels = np.arange(256, dtype=np.uint8).reshape(16, 16)
    restored = denormalize_image(normalize_image(levels, DomainTag.Y))
    npt.assert_array_equal(restored[:, :, 0], levels)


def test_denormalize_clamps():
    """Testing clamping of out of range network outputs"""
    npt.assert_array_equal(denormalize_image(np.array([[[-3.0, 2.0]]])), [[[0], [255]]])


def test_image_tensor_contracts():
    """Testing channel and range validation of ImageTensor"""
    with pytest.raises(ShapeMismatchError):
        ImageTensor(np.zeros((2, 4, 4)))
    with pytest.raises(ValueError):
        ImageTensor(np.full((3, 4, 4), 1.5))
    image = ImageTensor(np.zeros((1, 4, 4)), DomainTag.Y)
    with pytest.raises(ValueError):
        image.data[0, 0, 0] = 1.0
    assert image.to_batch().shape == (1, 1, 4, 4)
    clamped = ImageTensor.from_tensor(torch.full((1, 3, 2, 2), 4.0))
    npt.assert_array_equal(clamped.data, np.ones((3, 2, 2)))


def test_normalize_rejects_two_channels():
    """Testing that only 1 or 3 channels are accepted"""
    with pytest.raises(ShapeMismatchError):
        normalize_image(np.zeros((4, 4, 2), dtype=np.uint8))


def test_hyperparameter_defaults():
    """Testing the default hyperparameters"""
    hp = Hyperparameters()
    assert hp.lambda_cyc == 10.0
    assert hp.lambda_id == 0.5
    assert hp.lambda_reg == 0.3
    assert hp.lambda_match == 1.0
    assert hp.epsilon_amplitude == 0.01
    assert hp.learning_rate == 0.002
    assert hp.epochs == 200
    assert hp.latent_channels == 256


@pytest.mark.parametrize("name, depth, batch, lambda_reg", [
    ('googlemaps', 8, 1, 0.3),
    ('planign', 1, 1, 0.25),
    ('brats', 8, 12, 0.3),
])
def test_presets(name, depth, batch, lambda_reg):
    """Testing the dataset presets"""
    hp = Hyperparameters.from_preset(name)
    assert hp.encoder_depth == depth
    assert hp.batch_size == batch
    assert hp.lambda_reg == lambda_reg
    assert hp.lambda_match == 1.0
    assert Hyperparameters.from_preset(name, epochs=3).epochs == 3
    assert name in DATASET_PRESETS


@pytest.mark.parametrize("config", [
    {'encoder_depth': 9},
    {'encoder_depth': -2},
    {'lambda_reg': -0.1},
    {'batch_size': 0},
    {'input_nc': 2},
    {'sigma1': 10.0, 'sigma2': 5.0},
    {'unknown_key': 1},
])
def test_invalid_hyperparameters(config):
    """Testing rejection of invalid hyperparameters"""
    with pytest.raises(ConfigurationError):
        Hyperparameters.from_config(config)


def test_hyperparameter_config():
    """Testing the configuration mapping and its documentation"""
    hp = Hyperparameters(lambda_reg=0.1, encoder_depth=-1)
    assert Hyperparameters.from_config(hp.to_config()) == hp
    docs = Hyperparameters.config_docs()
    assert docs['lambda_reg']['default'] == 0.3
    assert docs['lambda_reg']['doc']
    with pytest.raises(ConfigurationError):
        Hyperparameters.from_preset('cityscapes')


def test_bundle_resolution():
    """Testing the resolution check of a translation bundle"""
    image = torch.zeros(1, 3, 8, 8)
    z = torch.zeros(1, 4, 2, 2)
    fields = dict(x=image, y=image, x_gen=image, y_gen=image, y_gen_clean=image, x_rec=image,
                  y_rec=image, y_rec_clean=image, z_gen=z, z_rec=z, m_gen=z, m_rec=z,
                  z_gen_unmatch=z, z_gen_match=z)
    TranslationBundle(**fields).check_resolution()
    fields['y_rec'] = torch.zeros(1, 3, 4, 4)
    with pytest.raises(ShapeMismatchError):
        TranslationBundle(**fields).check_resolution()


if __name__ == '__main__':
    pytest.main(sys.argv)
