"""Value types shared by every part of stegogan."""
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
import enum
from typing import (
    Any,
    Dict,
    Optional,
    Tuple,
)
import numpy as np
import torch
from stegogan.config import ConfigMixin, config_field
from stegogan.errors import ConfigurationError, ShapeMismatchError

# Batched tensors use the N x C x H x W layout throughout.
# FeatureMap: encoder output z, UnmatchabilityMask: M(z) in [0, 1] with the shape of z,
# ConsistencyMask: I(m) of shape N x 1 x H x W at image resolution.
FeatureMap = torch.Tensor
UnmatchabilityMask = torch.Tensor
ConsistencyMask = torch.Tensor

ALLOWED_CHANNELS = (1, 3)
SPLIT_DEPTH_RANGE = (-1, 8)


class DomainTag(enum.Enum):
    """The two image domains."""

    X = 'X'
    Y = 'Y'


@dataclasses.dataclass(frozen=True, eq=False)
class ImageTensor:
    """A single C x H x W image with values in [-1, 1].

    Args:
        data: Real array of shape channels x height x width
        domain_tag: Domain the image belongs to
    """

    data: np.ndarray
    domain_tag: DomainTag = DomainTag.X

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 3 or data.shape[0] not in ALLOWED_CHANNELS:
            raise ShapeMismatchError(
                'ImageTensor needs shape C x H x W with C in {}, got {}'.format(
                    ALLOWED_CHANNELS, data.shape))
        if data.size > 0 and (data.min() < -1.0 or data.max() > 1.0):
            raise ValueError('ImageTensor values must lie in [-1, 1]')
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @property
    def shape(self) -> Tuple[int, int, int]:
        """Shape channels x height x width"""
        return self.data.shape  # type: ignore

    def to_batch(self, dtype: torch.dtype = torch.float32) -> torch.Tensor:
        """Return the image as a 1 x C x H x W tensor

        Args:
            dtype: Floating point type of the tensor

        Returns:
            torch.Tensor
        """
        return torch.as_tensor(np.array(self.data), dtype=dtype).unsqueeze(0)

    @classmethod
    def from_tensor(cls, tensor: torch.Tensor,
                    domain_tag: DomainTag = DomainTag.X) -> 'ImageTensor':
        """Create an ImageTensor from a C x H x W or 1 x C x H x W tensor

        Values are clamped to [-1, 1].

        Args:
            tensor: Network output
            domain_tag: Domain of the image

        Returns:
            ImageTensor
        """
        array = tensor.detach().cpu().double().clamp(-1.0, 1.0).numpy()
        if array.ndim == 4:
            if array.shape[0] != 1:
                raise ShapeMismatchError('Expected a single image, got batch of {}'.format(
                    array.shape[0]))
            array = array[0]
        return cls(data=array, domain_tag=domain_tag)


def normalize_image(raw: np.ndarray, domain_tag: DomainTag = DomainTag.X) -> ImageTensor:
    """Map an 8-bit image to [-1, 1]

    Args:
        raw: Integer array with values 0-255, either H x W or H x W x C with C in {1, 3}
        domain_tag: Domain of the image

    Returns:
        ImageTensor: C x H x W image where 0 maps to -1 and 255 to 1

    Raises:
        ShapeMismatchError: channel count not in {1, 3}
    """
    raw = np.asarray(raw)
    if raw.ndim == 2:
        raw = raw[:, :, None]
    if raw.ndim != 3 or raw.shape[2] not in ALLOWED_CHANNELS:
        raise ShapeMismatchError('Images need 1 or 3 channels, got shape {}'.format(raw.shape))
    data = raw.astype(np.float64).transpose(2, 0, 1) / 127.5 - 1.0
    return ImageTensor(data=data, domain_tag=domain_tag)


def denormalize_image(img: Any) -> np.ndarray:
    """Map a [-1, 1] image back to 8-bit values

    Out-of-range values are clamped; halves round up.

    Args:
        img: ImageTensor or C x H x W array

    Returns:
        np.ndarray: uint8 array of shape H x W x C
    """
    data = img.data if isinstance(img, ImageTensor) else np.asarray(img, dtype=np.float64)
    scaled = (np.clip(data, -1.0, 1.0) + 1.0) * 127.5
    rounded = np.floor(scaled + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8).transpose(1, 2, 0)


@dataclasses.dataclass(frozen=True)
class BackwardCycleResult:
    """Outputs of the backward cycle y -> x_gen -> y_rec."""

    y: torch.Tensor
    z_gen: FeatureMap
    m_gen: UnmatchabilityMask
    z_gen_unmatch: FeatureMap
    z_gen_match: FeatureMap
    x_gen: torch.Tensor
    y_rec_clean: torch.Tensor
    y_rec: torch.Tensor


@dataclasses.dataclass(frozen=True)
class ForwardCycleResult:
    """Outputs of the forward cycle x -> y_gen -> x_rec."""

    x: torch.Tensor
    y_gen: torch.Tensor
    y_gen_clean: torch.Tensor
    z_rec: FeatureMap
    m_rec: UnmatchabilityMask
    x_rec: torch.Tensor


@dataclasses.dataclass(frozen=True)
class TranslationBundle:
    """Everything produced by one backward plus forward pass.

    ``x_idt`` and ``y_idt`` hold the identity translations G_YtoX(x) and G_XtoY(y)
    once attached with :func:`dataclasses.replace`.
    """

    x: torch.Tensor
    y: torch.Tensor
    x_gen: torch.Tensor
    y_gen: torch.Tensor
    y_gen_clean: torch.Tensor
    x_rec: torch.Tensor
    y_rec: torch.Tensor
    y_rec_clean: torch.Tensor
    z_gen: FeatureMap
    z_rec: FeatureMap
    m_gen: UnmatchabilityMask
    m_rec: UnmatchabilityMask
    z_gen_unmatch: FeatureMap
    z_gen_match: FeatureMap
    x_idt: Optional[torch.Tensor] = None
    y_idt: Optional[torch.Tensor] = None

    @classmethod
    def from_cycles(cls, backward: BackwardCycleResult,
                    forward: ForwardCycleResult) -> 'TranslationBundle':
        """Combine the two partial results of one iteration

        Args:
            backward: Result of the backward cycle
            forward: Result of the forward cycle

        Returns:
            TranslationBundle
        """
        return cls(x=forward.x, y=backward.y,
                   x_gen=backward.x_gen, y_gen=forward.y_gen,
                   y_gen_clean=forward.y_gen_clean, x_rec=forward.x_rec,
                   y_rec=backward.y_rec, y_rec_clean=backward.y_rec_clean,
                   z_gen=backward.z_gen, z_rec=forward.z_rec,
                   m_gen=backward.m_gen, m_rec=forward.m_rec,
                   z_gen_unmatch=backward.z_gen_unmatch, z_gen_match=backward.z_gen_match)

    def images(self) -> Dict[str, torch.Tensor]:
        """Return the image-valued fields by name

        Returns:
            Dict[str, torch.Tensor]
        """
        names = ['x', 'y', 'x_gen', 'y_gen', 'y_gen_clean', 'x_rec', 'y_rec', 'y_rec_clean']
        return {name: getattr(self, name) for name in names}

    def check_resolution(self) -> None:
        """Check that every image field shares the input resolution

        Raises:
            ShapeMismatchError: An image field has a different spatial size
        """
        size = tuple(self.x.shape[-2:])
        for name, image in self.images().items():
            if tuple(image.shape[-2:]) != size:
                raise ShapeMismatchError('{} has resolution {}, expected {}'.format(
                    name, tuple(image.shape[-2:]), size))


@dataclasses.dataclass(frozen=True)
class Hyperparameters(ConfigMixin):
    """Model and optimisation hyperparameters.

    The learning rate default of 0.002 is deliberately ten times the usual CycleGAN value.
    """

    lambda_cyc: float = config_field(10.0, 'Weight of the cycle consistency loss')
    lambda_id: float = config_field(
        0.5, 'Identity loss weight, applied relative to lambda_cyc unless configured absolute')
    lambda_reg: float = config_field(0.3, 'Weight of the L0.5 mask regularization')
    lambda_match: float = config_field(1.0, 'Weight of the matchable consistency loss')
    epsilon_amplitude: float = config_field(
        0.01, 'Standard deviation of the noise added to x_gen before back-translation')
    encoder_depth: int = config_field(
        1, 'Index of the last residual block in the encoder, -1 (stem only) to 8 (no decoder)')
    batch_size: int = config_field(1, 'Images per domain and iteration')
    epochs: int = config_field(200, 'Number of training epochs')
    learning_rate: float = config_field(0.002, 'Adam learning rate')
    beta1: float = config_field(0.5, 'Adam first moment decay')
    beta2: float = config_field(0.999, 'Adam second moment decay')
    sigma1: float = config_field(5.0, 'Tight accuracy threshold in 0-255 units')
    sigma2: float = config_field(10.0, 'Loose accuracy threshold in 0-255 units')
    input_nc: int = config_field(3, 'Channels of domain X images')
    output_nc: int = config_field(3, 'Channels of domain Y images')
    ngf: int = config_field(64, 'Filters of the first generator layer')
    ndf: int = config_field(64, 'Filters of the first discriminator layer')

    def __post_init__(self) -> None:
        for name in ('lambda_cyc', 'lambda_id', 'lambda_reg', 'lambda_match'):
            if getattr(self, name) < 0:
                raise ConfigurationError('{} must be non-negative'.format(name))
        if self.epsilon_amplitude < 0:
            raise ConfigurationError('epsilon_amplitude must be non-negative')
        low, high = SPLIT_DEPTH_RANGE
        if not low <= self.encoder_depth <= high:
            raise ConfigurationError('encoder_depth must lie in [{}, {}], got {}'.format(
                low, high, self.encoder_depth))
        if self.batch_size < 1:
            raise ConfigurationError('batch_size must be positive')
        if self.epochs < 0:
            raise ConfigurationError('epochs must be non-negative')
        if self.learning_rate <= 0:
            raise ConfigurationError('learning_rate must be positive')
        if not self.sigma1 < self.sigma2:
            raise ConfigurationError('sigma1 must be smaller than sigma2')
        if self.input_nc not in ALLOWED_CHANNELS or self.output_nc not in ALLOWED_CHANNELS:
            raise ConfigurationError('input_nc and output_nc must be 1 or 3')
        if self.ngf < 1 or self.ndf < 1:
            raise ConfigurationError('ngf and ndf must be positive')

    @property
    def latent_channels(self) -> int:
        """Channels of the encoder feature map"""
        return self.ngf * 4

    @classmethod
    def from_preset(cls, name: str, **overrides: Any) -> 'Hyperparameters':
        """Create hyperparameters from a named dataset preset

        Args:
            name: One of the keys of DATASET_PRESETS
            **overrides: Fields replacing the preset values

        Returns:
            Hyperparameters

        Raises:
            ConfigurationError: Unknown preset
        """
        if name not in DATASET_PRESETS:
            raise ConfigurationError('Unknown preset {}, choose from {}'.format(
                name, ', '.join(sorted(DATASET_PRESETS))))
        config = dict(DATASET_PRESETS[name])
        config.update(overrides)
        return cls.from_config(config)


DATASET_PRESETS: Dict[str, Dict[str, Any]] = {
    'googlemaps': {'lambda_reg': 0.3, 'encoder_depth': 8, 'batch_size': 1,
                   'lambda_match': 1.0, 'sigma1': 5.0, 'sigma2': 10.0},
    'planign': {'lambda_reg': 0.25, 'encoder_depth': 1, 'batch_size': 1,
                'lambda_match': 1.0, 'sigma1': 2.0, 'sigma2': 5.0},
    'brats': {'lambda_reg': 0.3, 'encoder_depth': 8, 'batch_size': 12,
              'lambda_match': 1.0, 'input_nc': 1, 'output_nc': 1},
}
