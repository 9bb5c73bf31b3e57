"""Replay buffer of generated images for discriminator updates."""
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
from typing import (
    Any,
    Dict,
    List,
    Optional,
)
import numpy as np
import torch


class ImagePool:
    """History of generated images

    Until the pool is full every incoming image is stored and returned unchanged. Afterwards each
    incoming image is returned as is with probability one half; otherwise a uniformly chosen stored
    image is returned and replaced by the incoming one. A pool size of 0 disables the buffer.

    Args:
        pool_size: Number of stored images
        rng: Random number generator deciding the swaps
    """

    def __init__(self, pool_size: int = 50, rng: Optional[np.random.Generator] = None) -> None:
        if pool_size < 0:
            raise ValueError('pool_size must be non-negative')
        self.pool_size = pool_size
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.images: List[torch.Tensor] = list()

    def __len__(self) -> int:
        return len(self.images)

    def query(self, images: torch.Tensor) -> torch.Tensor:
        """Pass a batch of generated images through the pool

        Args:
            images: N x C x H x W batch, detached from the graph

        Returns:
            torch.Tensor: batch of the same shape
        """
        if self.pool_size == 0:
            return images
        returned = list()
        for image in images.detach():
            image = image.unsqueeze(0)
            if len(self.images) < self.pool_size:
                self.images.append(image.clone())
                returned.append(image)
            elif self.rng.random() < 0.5:
                index = int(self.rng.integers(self.pool_size))
                returned.append(self.images[index].clone())
                self.images[index] = image.clone()
            else:
                returned.append(image)
        return torch.cat(returned, dim=0)

    def state_dict(self) -> Dict[str, Any]:
        """Return the stored images and the generator state

        Returns:
            Dict[str, Any]
        """
        return {'pool_size': self.pool_size,
                'images': [image.cpu() for image in self.images],
                'rng': self.rng.bit_generator.state}

    def load_state_dict(self, state: Dict[str, Any], device: str = 'cpu') -> None:
        """Restore a state produced by :meth:`state_dict`

        Args:
            state: The saved state
            device: Device the stored images are moved to
        """
        self.pool_size = int(state['pool_size'])
        self.images = [image.to(device) for image in state['images']]
        self.rng.bit_generator.state = state['rng']
