"""Testing generators, mask predictor and discriminators"""
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
import numpy.testing as npt
import torch
from stegogan.domain import Hyperparameters
from stegogan.errors import ConfigurationError, ImageTooSmallError, ShapeMismatchError
from stegogan.networks import (
    CHECKPOINT_NAMES,
    StegoNetworks,
    build_discriminator,
    build_generator,
    build_mask_predictor,
    build_networks,
    discriminate,
)

SMALL = Hyperparameters(ngf=4, ndf=4)


@pytest.mark.parametrize("split_depth", [-1, 0, 1, 4, 8])
def test_encode_decode_composes_to_forward(split_depth):
    """Testing that encoder plus decoder is the monolithic generator for every split"""
    torch.manual_seed(0)
    generator = build_generator(3, 3, split_depth, ngf=4)
    x = torch.rand(2, 3, 32, 32) * 2 - 1
    z = generator.encode(x)
    assert tuple(z.shape) == (2, 16, 8, 8)
    assert generator.feature_shape(32, 32) == (16, 8, 8)
    assert generator.n_encoder_blocks == split_depth + 1
    y = generator.decode(z)
    assert tuple(y.shape) == (2, 3, 32, 32)
    assert float(y.abs().max()) <= 1.0
    npt.assert_allclose(generator(x).detach().numpy(),
                        generator.monolithic()(x).detach().numpy(), atol=1e-6)


def test_parameter_names_independent_of_split():
    """Testing that checkpoints are exchangeable between split depths"""
    shallow = build_generator(3, 3, -1, ngf=4).state_dict()
    deep = build_generator(3, 3, 8, ngf=4).state_dict()
    assert list(shallow.keys()) == list(deep.keys())
    for key in shallow:
        assert shallow[key].shape == deep[key].shape


@pytest.mark.parametrize("split_depth", [-2, 9])
def test_split_depth_range(split_depth):
    """Testing rejection of split depths outside -1 .. 8"""
    with pytest.raises(ConfigurationError):
        build_generator(3, 3, split_depth)


def test_encoder_input_checks():
    """Testing channel and size checks of the encoder"""
    generator = build_generator(3, 3, 1, ngf=4)
    with pytest.raises(ShapeMismatchError):
        generator.encode(torch.zeros(1, 1, 32, 32))
    with pytest.raises(ShapeMismatchError):
        generator.encode(torch.zeros(1, 3, 30, 32))
    with pytest.raises(ShapeMismatchError):
        generator.decode(torch.zeros(1, 8, 8, 8))


def test_mask_predictor_range():
    """Testing that the mask has the feature map shape and values in [0, 1]"""
    torch.manual_seed(1)
    predictor = build_mask_predictor(16)
    z = torch.randn(3, 16, 8, 8) * 10
    m = predictor(z)
    assert m.shape == z.shape
    assert float(m.min()) >= 0.0
    assert float(m.max()) <= 1.0
    with pytest.raises(ShapeMismatchError):
        predictor(torch.zeros(1, 8, 8, 8))


@pytest.mark.parametrize("size, expected", [
    (256, (30, 30)),
    (64, (6, 6)),
    (32, (2, 2)),
])
def test_discriminator_score_map(size, expected):
    """Testing the PatchGAN score map size"""
    d = build_discriminator(3, ndf=4)
    assert d.output_size(size, size) == expected
    scores = discriminate(d, torch.zeros(2, 3, size, size))
    assert tuple(scores.shape) == (2, 1) + expected


def test_discriminator_rejects_small_images():
    """Testing that images with an empty score map are rejected"""
    d = build_discriminator(3, ndf=4)
    with pytest.raises(ImageTooSmallError):
        discriminate(d, torch.zeros(1, 3, 16, 16))


def test_networks_share_latent_space():
    """Testing the latent compatibility check of the network set"""
    nets = build_networks(SMALL, seed=0)
    assert set(nets.named_networks()) == set(CHECKPOINT_NAMES)
    n_generator = sum(p.numel() for p in nets.generator_parameters())
    n_discriminator = sum(p.numel() for p in nets.discriminator_parameters())
    assert n_generator + n_discriminator == sum(p.numel() for p in nets.parameters())
    with pytest.raises(ConfigurationError):
        StegoNetworks(g_xy=build_generator(3, 3, 1, ngf=4),
                      g_yx=build_generator(3, 3, 1, ngf=8),
                      mask=build_mask_predictor(16),
                      d_x=build_discriminator(3, 4), d_y=build_discriminator(3, 4))
    with pytest.raises(ConfigurationError):
        StegoNetworks(g_xy=build_generator(3, 3, 1, ngf=4),
                      g_yx=build_generator(3, 3, 2, ngf=4),
                      mask=build_mask_predictor(16),
                      d_x=build_discriminator(3, 4), d_y=build_discriminator(3, 4))


def test_seeded_initialisation():
    """Testing that a seed fixes all initial weights"""
    first = build_networks(SMALL, seed=5).state_dict()
    second = build_networks(SMALL, seed=5).state_dict()
    for key in first:
        assert torch.equal(first[key], second[key])


def test_grayscale_channels():
    """Testing single channel domains"""
    nets = build_networks(Hyperparameters(ngf=4, ndf=4, input_nc=1, output_nc=3), seed=0)
    assert tuple(nets.g_xy(torch.zeros(1, 1, 32, 32)).shape) == (1, 3, 32, 32)
    assert tuple(nets.g_yx(torch.zeros(1, 3, 32, 32)).shape) == (1, 1, 32, 32)


if __name__ == '__main__':
    pytest.main(sys.argv)
