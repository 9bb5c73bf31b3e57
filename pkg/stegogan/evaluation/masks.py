"""Unmatchability masks of target images."""
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
    Optional,
    Sequence,
)
import numpy as np
import torch
from stegogan.cycle.stego_cycle import consistency_mask, disentangle, translate, \
    unmatchable_footprint
from stegogan.domain.domain_model import DomainTag
from stegogan.domain.image_io import batch_to_uint8, load_batch, write_image
from stegogan.networks.networks import StegoNetworks

logger = logging.getLogger(__name__)

FOOTPRINT = 'footprint'
LATENT_MASK = 'mask'
CONSISTENCY = 'consistency'
X_GEN = 'x_gen'
Y_GEN = 'y_gen'


def predict_footprints(nets: StegoNetworks, y: torch.Tensor) -> torch.Tensor:
    """Image resolution unmatchable footprint 1 - I(M(z)) of domain Y images

    Args:
        nets: Trained networks
        y: N x C x H x W images in [-1, 1]

    Returns:
        torch.Tensor: N x H x W values in [0, 1]
    """
    with torch.no_grad():
        m = nets.mask(nets.g_yx.encode(y))
        return unmatchable_footprint(m, tuple(y.shape[-2:]))[:, 0]


def _to_gray(values: torch.Tensor) -> np.ndarray:
    array = values.detach().cpu().double().numpy()
    return np.floor(np.clip(array, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def _output_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0] + '.png'


def export_masks(nets: StegoNetworks, y_paths: Sequence[str], out_dir: str,
                 channels: int = 3, device: str = 'cpu', use_mask: bool = True,
                 x_paths: Optional[Sequence[str]] = None,
                 x_channels: int = 3) -> Dict[str, List[str]]:
    """Write the masks and translations of target images, one subdirectory per kind

    For every domain Y image the following files, named after the input, are written:

    * ``mask/``: channel maximum of M(z) at feature map resolution, 8-bit grayscale
    * ``consistency/``: I(m) at image resolution, 8-bit grayscale
    * ``footprint/``: 1 - I(m) at image resolution, 8-bit grayscale
    * ``x_gen/``: the domain X translation G_YtoX decoding the matchable features

    Domain X images given in x_paths are translated into ``y_gen/`` as at inference time.

    Args:
        nets: Trained networks
        y_paths: Domain Y image files
        out_dir: Output directory
        channels: Channels of the domain Y images
        device: Torch device
        use_mask: False exports the all-zero mask of the CycleGAN baseline
        x_paths: Optional domain X image files
        x_channels: Channels of the domain X images

    Returns:
        Dict[str, List[str]]: written files per output kind
    """
    written: Dict[str, List[str]] = {kind: list() for kind in
                                     (LATENT_MASK, CONSISTENCY, FOOTPRINT, X_GEN)}
    nets.eval()
    with torch.no_grad():
        for path in y_paths:
            y = load_batch([path], channels=channels, domain_tag=DomainTag.Y).to(device)
            z = nets.g_yx.encode(y)
            m = nets.mask(z) if use_mask else torch.zeros_like(z)
            _, z_match = disentangle(z, m)
            consistency = consistency_mask(m, tuple(y.shape[-2:]))[0, 0]
            images = {LATENT_MASK: _to_gray(m[0].amax(dim=0)),
                      CONSISTENCY: _to_gray(consistency),
                      FOOTPRINT: _to_gray(1.0 - consistency),
                      X_GEN: batch_to_uint8(nets.g_yx.decode(z_match))[0]}
            for kind, image in images.items():
                target = os.path.join(out_dir, kind, _output_name(path))
                write_image(target, image)
                written[kind].append(target)
        if x_paths is not None:
            written[Y_GEN] = list()
            for path in x_paths:
                x = load_batch([path], channels=x_channels, domain_tag=DomainTag.X).to(device)
                target = os.path.join(out_dir, Y_GEN, _output_name(path))
                write_image(target, batch_to_uint8(translate(x, nets))[0])
                written[Y_GEN].append(target)
    logger.info('Wrote masks of %d images and %d translations to %s', len(y_paths),
                len(written.get(Y_GEN, ())), out_dir)
    return written
