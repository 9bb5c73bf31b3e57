"""Generators, mask predictor and discriminators."""
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
import itertools
from typing import (
    Dict,
    Iterator,
    List,
    Optional,
    Tuple,
)
import torch
import torch.nn as nn
from stegogan.domain.domain_model import Hyperparameters, SPLIT_DEPTH_RANGE
from stegogan.errors import ConfigurationError, ImageTooSmallError, ShapeMismatchError

N_RESIDUAL_BLOCKS = 9
INIT_STD = 0.02

# checkpoint name -> attribute of StegoNetworks
CHECKPOINT_NAMES: Dict[str, str] = {
    'G_XtoY': 'g_xy',
    'G_YtoX': 'g_yx',
    'M': 'mask',
    'D_X': 'd_x',
    'D_Y': 'd_y',
}


def init_weights(module: nn.Module, std: float = INIT_STD) -> None:
    """Initialise convolutions with N(0, std) weights and zero biases

    Args:
        module: Module whose convolution layers are initialised in place
        std: Standard deviation of the weights
    """
    for layer in module.modules():
        if isinstance(layer, (nn.Conv2d, nn.ConvTranspose2d)):
            nn.init.normal_(layer.weight, 0.0, std)
            if layer.bias is not None:
                nn.init.zeros_(layer.bias)


class ResidualBlock(nn.Module):
    """Two reflection padded 3x3 convolutions with a skip connection."""

    def __init__(self, channels: int) -> None:
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, kernel_size=3),
            nn.InstanceNorm2d(channels),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, kernel_size=3),
            nn.InstanceNorm2d(channels),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.block(x)


class SplitGenerator(nn.Module):
    r"""ResNet generator with 9 residual blocks, split into encoder and decoder.

    The downsampling stem lifts the image to ``4 * ngf`` channels at a quarter of the
    resolution. Residual blocks ``0 .. split_depth`` belong to the encoder, the remaining
    blocks and the upsampling head to the decoder, so ``split_depth=-1`` leaves a stem-only
    encoder and ``split_depth=8`` a head-only decoder. All blocks live in a single module list,
    which keeps parameter names identical for every split depth.
    """

    def __init__(self,
                 in_channels: int = 3,
                 out_channels: int = 3,
                 split_depth: int = 1,
                 ngf: int = 64) -> None:
        """Initialize the generator

        Args:
            in_channels: Channels of the input images
            out_channels: Channels of the generated images
            split_depth: Index of the last residual block of the encoder, -1 to 8
            ngf: Filters of the first convolution

        Raises:
            ConfigurationError: split_depth out of range
        """
        super().__init__()
        low, high = SPLIT_DEPTH_RANGE
        if not low <= split_depth <= high:
            raise ConfigurationError('split_depth must lie in [{}, {}], got {}'.format(
                low, high, split_depth))
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.split_depth = split_depth
        self.latent_channels = ngf * 4

        self.stem = nn.Sequential(
            nn.ReflectionPad2d(3),
            nn.Conv2d(in_channels, ngf, kernel_size=7),
            nn.InstanceNorm2d(ngf),
            nn.ReLU(inplace=True),
            nn.Conv2d(ngf, ngf * 2, kernel_size=3, stride=2, padding=1),
            nn.InstanceNorm2d(ngf * 2),
            nn.ReLU(inplace=True),
            nn.Conv2d(ngf * 2, ngf * 4, kernel_size=3, stride=2, padding=1),
            nn.InstanceNorm2d(ngf * 4),
            nn.ReLU(inplace=True),
        )
        self.blocks = nn.ModuleList(
            [ResidualBlock(self.latent_channels) for _ in range(N_RESIDUAL_BLOCKS)])
        self.head = nn.Sequential(
            nn.ConvTranspose2d(ngf * 4, ngf * 2, kernel_size=3, stride=2, padding=1,
                               output_padding=1),
            nn.InstanceNorm2d(ngf * 2),
            nn.ReLU(inplace=True),
            nn.ConvTranspose2d(ngf * 2, ngf, kernel_size=3, stride=2, padding=1,
                               output_padding=1),
            nn.InstanceNorm2d(ngf),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(3),
            nn.Conv2d(ngf, out_channels, kernel_size=7),
            nn.Tanh(),
        )

    @property
    def n_encoder_blocks(self) -> int:
        """Residual blocks belonging to the encoder"""
        return self.split_depth + 1

    def feature_shape(self, height: int, width: int) -> Tuple[int, int, int]:
        """Shape C x H x W of the feature map of an image of the given size

        Args:
            height: Image height
            width: Image width

        Returns:
            Tuple[int, int, int]
        """
        return (self.latent_channels, height // 4, width // 4)

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        """Map images to the feature map z

        Args:
            x: N x C x H x W images with H and W divisible by 4

        Returns:
            torch.Tensor: feature map

        Raises:
            ShapeMismatchError: Wrong channel count or size not divisible by 4
        """
        if x.dim() != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatchError('Generator expects N x {} x H x W input, got {}'.format(
                self.in_channels, tuple(x.shape)))
        if x.shape[2] % 4 or x.shape[3] % 4:
            raise ShapeMismatchError('Image size must be divisible by 4, got {}'.format(
                tuple(x.shape[2:])))
        z = self.stem(x)
        for block in self.blocks[:self.n_encoder_blocks]:
            z = block(z)
        return z

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        """Map a feature map to images

        Args:
            z: Feature map with latent_channels channels

        Returns:
            torch.Tensor: images in [-1, 1]
        """
        if z.dim() != 4 or z.shape[1] != self.latent_channels:
            raise ShapeMismatchError('Decoder expects {} latent channels, got {}'.format(
                self.latent_channels, tuple(z.shape)))
        for block in self.blocks[self.n_encoder_blocks:]:
            z = block(z)
        return self.head(z)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.decode(self.encode(x))

    def monolithic(self) -> nn.Sequential:
        """Return the unsplit generator sharing this generator's layers

        Returns:
            nn.Sequential
        """
        return nn.Sequential(*self.stem, *self.blocks, *self.head)


class MaskPredictor(nn.Module):
    """Three channel preserving 3x3 convolutions ending in a sigmoid."""

    def __init__(self, latent_channels: int) -> None:
        super().__init__()
        self.latent_channels = latent_channels
        self.layers = nn.Sequential(
            nn.Conv2d(latent_channels, latent_channels, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(latent_channels, latent_channels, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(latent_channels, latent_channels, kernel_size=3, padding=1),
            nn.Sigmoid(),
        )

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        if z.dim() != 4 or z.shape[1] != self.latent_channels:
            raise ShapeMismatchError('Mask predictor expects {} channels, got {}'.format(
                self.latent_channels, tuple(z.shape)))
        return self.layers(z)


class PatchDiscriminator(nn.Module):
    """PatchGAN discriminator with a 70x70 receptive field."""

    def __init__(self, in_channels: int = 3, ndf: int = 64, n_layers: int = 3) -> None:
        super().__init__()
        self.in_channels = in_channels
        layers: List[nn.Module] = [
            nn.Conv2d(in_channels, ndf, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2, True),
        ]
        multiplier = 1
        for index in range(1, n_layers):
            previous, multiplier = multiplier, min(2 ** index, 8)
            layers += [
                nn.Conv2d(ndf * previous, ndf * multiplier, kernel_size=4, stride=2, padding=1),
                nn.InstanceNorm2d(ndf * multiplier),
                nn.LeakyReLU(0.2, True),
            ]
        previous, multiplier = multiplier, min(2 ** n_layers, 8)
        layers += [
            nn.Conv2d(ndf * previous, ndf * multiplier, kernel_size=4, stride=1, padding=1),
            nn.InstanceNorm2d(ndf * multiplier),
            nn.LeakyReLU(0.2, True),
            nn.Conv2d(ndf * multiplier, 1, kernel_size=4, stride=1, padding=1),
        ]
        self.layers = nn.Sequential(*layers)
        self._strides = [2] * n_layers + [1, 1]

    def output_size(self, height: int, width: int) -> Tuple[int, int]:
        """Spatial size of the score map for an input of the given size

        Args:
            height: Input height
            width: Input width

        Returns:
            Tuple[int, int]
        """
        size = [height, width]
        for stride in self._strides:
            size = [(value + 2 - 4) // stride + 1 for value in size]
        return size[0], size[1]

    def forward(self, img: torch.Tensor) -> torch.Tensor:
        return self.layers(img)


def build_generator(in_channels: int, out_channels: int, split_depth: int,
                    ngf: int = 64) -> SplitGenerator:
    """Build an initialised split generator

    Args:
        in_channels: Channels of the input images
        out_channels: Channels of the generated images
        split_depth: Index of the last residual block of the encoder, -1 to 8
        ngf: Filters of the first convolution

    Returns:
        SplitGenerator
    """
    generator = SplitGenerator(in_channels, out_channels, split_depth, ngf)
    init_weights(generator)
    return generator


def build_mask_predictor(latent_channels: int) -> MaskPredictor:
    """Build an initialised mask predictor

    Args:
        latent_channels: Channels of the generator feature map

    Returns:
        MaskPredictor
    """
    predictor = MaskPredictor(latent_channels)
    init_weights(predictor)
    return predictor


def build_discriminator(in_channels: int, ndf: int = 64) -> PatchDiscriminator:
    """Build an initialised PatchGAN discriminator

    Args:
        in_channels: Channels of the judged images
        ndf: Filters of the first convolution

    Returns:
        PatchDiscriminator
    """
    discriminator = PatchDiscriminator(in_channels, ndf)
    init_weights(discriminator)
    return discriminator


def discriminate(d: PatchDiscriminator, img: torch.Tensor) -> torch.Tensor:
    """Score images patch by patch, higher meaning judged real

    Args:
        d: The discriminator
        img: N x C x H x W images

    Returns:
        torch.Tensor: N x 1 x H' x W' score map

    Raises:
        ImageTooSmallError: The image yields an empty score map
    """
    if img.dim() == 3:
        img = img.unsqueeze(0)
    height, width = d.output_size(img.shape[2], img.shape[3])
    if height < 1 or width < 1:
        raise ImageTooSmallError('Image of size {} is too small for the discriminator'.format(
            tuple(img.shape[2:])))
    return d(img)


class StegoNetworks(nn.Module):
    """The five trainable networks of one model."""

    def __init__(self, g_xy: SplitGenerator, g_yx: SplitGenerator,
                 mask: MaskPredictor, d_x: PatchDiscriminator,
                 d_y: PatchDiscriminator) -> None:
        super().__init__()
        self.g_xy = g_xy
        self.g_yx = g_yx
        self.mask = mask
        self.d_x = d_x
        self.d_y = d_y
        self.check_latent_compatibility()

    def check_latent_compatibility(self) -> None:
        """Check that both generators and M share one feature space

        Raises:
            ConfigurationError: Latent channel counts differ
        """
        channels = {self.g_xy.latent_channels, self.g_yx.latent_channels,
                    self.mask.latent_channels}
        if len(channels) != 1:
            raise ConfigurationError('Latent channels of G_XtoY ({}), G_YtoX ({}) and M ({}) '
                                     'differ'.format(self.g_xy.latent_channels,
                                                     self.g_yx.latent_channels,
                                                     self.mask.latent_channels))
        if self.g_xy.split_depth != self.g_yx.split_depth:
            raise ConfigurationError('Both generators must use the same split depth')

    def generator_parameters(self) -> Iterator[nn.Parameter]:
        """Parameters of both generators and M"""
        return itertools.chain(self.g_xy.parameters(), self.g_yx.parameters(),
                               self.mask.parameters())

    def discriminator_parameters(self) -> Iterator[nn.Parameter]:
        """Parameters of both discriminators"""
        return itertools.chain(self.d_x.parameters(), self.d_y.parameters())

    def named_networks(self) -> Dict[str, nn.Module]:
        """Networks keyed by their checkpoint names"""
        return {name: getattr(self, attribute) for name, attribute in CHECKPOINT_NAMES.items()}


def build_networks(hp: Hyperparameters, seed: Optional[int] = None) -> StegoNetworks:
    """Build all networks for a set of hyperparameters

    Args:
        hp: Hyperparameters fixing channels, widths and split depth
        seed: Seed of the weight initialisation, the global torch RNG when None

    Returns:
        StegoNetworks
    """
    if seed is not None:
        torch.manual_seed(seed)
    return StegoNetworks(
        g_xy=build_generator(hp.input_nc, hp.output_nc, hp.encoder_depth, hp.ngf),
        g_yx=build_generator(hp.output_nc, hp.input_nc, hp.encoder_depth, hp.ngf),
        mask=build_mask_predictor(hp.latent_channels),
        d_x=build_discriminator(hp.input_nc, hp.ndf),
        d_y=build_discriminator(hp.output_nc, hp.ndf),
    )
