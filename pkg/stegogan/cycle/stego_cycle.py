"""Backward and forward cycles of StegoGAN."""
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
    Optional,
    Tuple,
)
import torch
import torch.nn.functional as F
from stegogan.domain.domain_model import (
    BackwardCycleResult,
    ConsistencyMask,
    FeatureMap,
    ForwardCycleResult,
    Hyperparameters,
    TranslationBundle,
    UnmatchabilityMask,
)
from stegogan.errors import ConfigurationError, ShapeMismatchError
from stegogan.networks.networks import StegoNetworks


def disentangle(z: FeatureMap, m: UnmatchabilityMask) -> Tuple[FeatureMap, FeatureMap]:
    """Split a feature map into its unmatchable and matchable parts

    Args:
        z: Feature map
        m: Unmatchability mask of the same shape

    Returns:
        Tuple[FeatureMap, FeatureMap]: (m * z, (1 - m) * z)

    Raises:
        ShapeMismatchError: Shapes differ
    """
    if z.shape != m.shape:
        raise ShapeMismatchError('Feature map {} and mask {} differ in shape'.format(
            tuple(z.shape), tuple(m.shape)))
    return m * z, (1.0 - m) * z


def perturb(img: torch.Tensor, amplitude: float,
            generator: Optional[torch.Generator] = None) -> torch.Tensor:
    """Add i.i.d. Gaussian noise of standard deviation ``amplitude``

    The result is not clamped to [-1, 1].

    Args:
        img: Images
        amplitude: Noise standard deviation
        generator: Random number generator, the global one when None

    Returns:
        torch.Tensor
    """
    if amplitude < 0:
        raise ValueError('amplitude must be non-negative')
    if amplitude == 0:
        return img
    noise = torch.randn(img.shape, generator=generator, dtype=img.dtype, device=img.device)
    return img + amplitude * noise


def _mask_of(z: FeatureMap, nets: StegoNetworks, use_mask: bool) -> UnmatchabilityMask:
    if use_mask:
        return nets.mask(z)
    return torch.zeros_like(z)


def backward_cycle(y: torch.Tensor, nets: StegoNetworks, hp: Hyperparameters,
                   generator: Optional[torch.Generator] = None,
                   use_mask: bool = True,
                   amplitude: Optional[float] = None) -> BackwardCycleResult:
    """Run y -> x_gen -> y_rec

    Args:
        y: Domain Y images
        nets: The networks
        hp: Hyperparameters, epsilon_amplitude sets the perturbation
        generator: Random number generator of the perturbation
        use_mask: False runs the CycleGAN baseline (mask identically zero)
        amplitude: Overrides hp.epsilon_amplitude when given

    Returns:
        BackwardCycleResult

    Raises:
        ConfigurationError: The two generators have incompatible feature spaces
    """
    amplitude = hp.epsilon_amplitude if amplitude is None else amplitude
    z_gen = nets.g_yx.encode(y)
    m_gen = _mask_of(z_gen, nets, use_mask)
    z_gen_unmatch, z_gen_match = disentangle(z_gen, m_gen)
    x_gen = nets.g_yx.decode(z_gen_match)
    y_rec_clean = nets.g_xy(x_gen)
    if not use_mask and amplitude == 0:
        y_rec = y_rec_clean
    else:
        z_perturbed = nets.g_xy.encode(perturb(x_gen, amplitude, generator))
        if z_perturbed.shape != z_gen_unmatch.shape:
            raise ConfigurationError(
                'Feature maps of G_XtoY {} and G_YtoX {} are incompatible'.format(
                    tuple(z_perturbed.shape), tuple(z_gen_unmatch.shape)))
        y_rec = nets.g_xy.decode(z_perturbed + z_gen_unmatch)
    return BackwardCycleResult(y=y, z_gen=z_gen, m_gen=m_gen, z_gen_unmatch=z_gen_unmatch,
                               z_gen_match=z_gen_match, x_gen=x_gen,
                               y_rec_clean=y_rec_clean, y_rec=y_rec)


def forward_cycle(x: torch.Tensor, z_gen_unmatch: FeatureMap, nets: StegoNetworks,
                  hp: Hyperparameters, use_mask: bool = True) -> ForwardCycleResult:
    """Run x -> y_gen -> x_rec with the unmatchable features of the backward cycle

    Args:
        x: Domain X images
        z_gen_unmatch: Unmatchable features from the same iteration's backward cycle
        nets: The networks
        hp: Hyperparameters
        use_mask: False runs the CycleGAN baseline

    Returns:
        ForwardCycleResult

    Raises:
        ShapeMismatchError: z_gen_unmatch does not match the feature map of x
    """
    z_x = nets.g_xy.encode(x)
    if z_x.shape != z_gen_unmatch.shape:
        raise ShapeMismatchError('Injected features {} do not match feature map {}'.format(
            tuple(z_gen_unmatch.shape), tuple(z_x.shape)))
    y_gen = nets.g_xy.decode(z_x + z_gen_unmatch)
    y_gen_clean = nets.g_xy.decode(z_x)
    z_rec = nets.g_yx.encode(y_gen)
    m_rec = _mask_of(z_rec, nets, use_mask)
    x_rec = nets.g_yx.decode((1.0 - m_rec) * z_rec)
    return ForwardCycleResult(x=x, y_gen=y_gen, y_gen_clean=y_gen_clean, z_rec=z_rec,
                              m_rec=m_rec, x_rec=x_rec)


def run_cycles(x: torch.Tensor, y: torch.Tensor, nets: StegoNetworks, hp: Hyperparameters,
               generator: Optional[torch.Generator] = None,
               use_mask: bool = True) -> TranslationBundle:
    """Run the backward cycle, then the forward cycle consuming its unmatchable features

    Args:
        x: Domain X images
        y: Domain Y images
        nets: The networks
        hp: Hyperparameters
        generator: Random number generator of the perturbation
        use_mask: False runs the CycleGAN baseline

    Returns:
        TranslationBundle
    """
    backward = backward_cycle(y, nets, hp, generator, use_mask=use_mask,
                              amplitude=hp.epsilon_amplitude if use_mask else 0.0)
    forward = forward_cycle(x, backward.z_gen_unmatch, nets, hp, use_mask=use_mask)
    return TranslationBundle.from_cycles(backward, forward)


def attach_identity(bundle: TranslationBundle, nets: StegoNetworks) -> TranslationBundle:
    """Add the identity translations G_YtoX(x) and G_XtoY(y) to a bundle

    Plain generator composition is used, without mask or injection.

    Args:
        bundle: Bundle of the current iteration
        nets: The networks

    Returns:
        TranslationBundle
    """
    return dataclasses.replace(bundle, x_idt=nets.g_yx(bundle.x), y_idt=nets.g_xy(bundle.y))


def consistency_mask(m: UnmatchabilityMask, target_hw: Tuple[int, int]) -> ConsistencyMask:
    """Compute I(m): one minus the channel maximum, nearest-upsampled to image size

    Args:
        m: N x C x h x w unmatchability mask
        target_hw: Image (height, width)

    Returns:
        ConsistencyMask: N x 1 x height x width

    Raises:
        ShapeMismatchError: target smaller than the mask
    """
    height, width = target_hw
    if height < m.shape[-2] or width < m.shape[-1]:
        raise ShapeMismatchError('Target size {} is smaller than mask size {}'.format(
            tuple(target_hw), tuple(m.shape[-2:])))
    flipped = 1.0 - m.amax(dim=1, keepdim=True)
    return F.interpolate(flipped, size=(height, width), mode='nearest')


def unmatchable_footprint(m: UnmatchabilityMask, target_hw: Tuple[int, int]) -> torch.Tensor:
    """Compute 1 - I(m), the image-resolution unmatchable region

    Args:
        m: Unmatchability mask
        target_hw: Image (height, width)

    Returns:
        torch.Tensor: N x 1 x height x width
    """
    return 1.0 - consistency_mask(m, target_hw)


def translate(x: torch.Tensor, nets: StegoNetworks) -> torch.Tensor:
    """Translate domain X images to domain Y as at inference time

    No mask and no injected features are used.

    Args:
        x: Domain X images, N x C x H x W or C x H x W
        nets: Trained networks

    Returns:
        torch.Tensor: G_XtoY(x)
    """
    single = x.dim() == 3
    with torch.no_grad():
        y = nets.g_xy(x.unsqueeze(0) if single else x)
    return y[0] if single else y
