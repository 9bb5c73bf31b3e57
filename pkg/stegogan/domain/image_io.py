"""Reading and writing 8-bit image files."""
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
import os
from typing import (
    List,
    Sequence,
)
import numpy as np
import torch
from PIL import Image
from stegogan.domain.domain_model import (
    DomainTag,
    denormalize_image,
    normalize_image,
)
from stegogan.errors import ShapeMismatchError

IMAGE_EXTENSIONS = ('.png', '.jpg', '.jpeg', '.bmp', '.tif', '.tiff')


def read_image(path: str, channels: int = 3) -> np.ndarray:
    """Read an image file as an H x W x C uint8 array

    Args:
        path: Image file
        channels: 1 for grayscale, 3 for RGB

    Returns:
        np.ndarray
    """
    with Image.open(path) as image:
        image = image.convert('L' if channels == 1 else 'RGB')
        array = np.asarray(image, dtype=np.uint8)
    if array.ndim == 2:
        array = array[:, :, None]
    return array


def write_image(path: str, array: np.ndarray) -> None:
    """Write an H x W, H x W x 1 or H x W x 3 uint8 array

    Args:
        path: Target file, format chosen by extension
        array: Image data
    """
    array = np.asarray(array, dtype=np.uint8)
    if array.ndim == 3 and array.shape[2] == 1:
        array = array[:, :, 0]
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    Image.fromarray(array).save(path)


def read_mask(path: str) -> np.ndarray:
    """Read a binary mask image (any non-zero pixel is set)

    Args:
        path: Mask file

    Returns:
        np.ndarray: boolean H x W array
    """
    return read_image(path, channels=1)[:, :, 0] > 0


def write_mask(path: str, mask: np.ndarray) -> None:
    """Write a boolean mask as a 0/255 grayscale image

    Args:
        path: Target file
        mask: Boolean H x W array
    """
    write_image(path, np.asarray(mask, dtype=bool).astype(np.uint8) * 255)


def list_images(directory: str) -> List[str]:
    """List image file names of a directory in sorted order

    Args:
        directory: Directory to scan

    Returns:
        List[str]: file names (not paths)
    """
    return sorted(name for name in os.listdir(directory)
                  if name.lower().endswith(IMAGE_EXTENSIONS)
                  and os.path.isfile(os.path.join(directory, name)))


def load_batch(paths: Sequence[str], channels: int = 3,
               domain_tag: DomainTag = DomainTag.X) -> torch.Tensor:
    """Load image files as one normalised N x C x H x W float tensor

    Args:
        paths: Image files of identical resolution
        channels: Channels to read
        domain_tag: Domain of the images

    Returns:
        torch.Tensor

    Raises:
        ShapeMismatchError: Images of different resolutions
    """
    images = [normalize_image(read_image(path, channels), domain_tag).data for path in paths]
    shapes = {image.shape for image in images}
    if len(shapes) > 1:
        raise ShapeMismatchError('Variable resolution batches are not supported: {}'.format(
            sorted(shapes)))
    return torch.as_tensor(np.stack(images), dtype=torch.float32)


def batch_to_uint8(batch: torch.Tensor) -> List[np.ndarray]:
    """Convert an N x C x H x W tensor in [-1, 1] to H x W x C uint8 arrays

    Args:
        batch: Network output

    Returns:
        List[np.ndarray]
    """
    array = batch.detach().cpu().double().numpy()
    return [denormalize_image(image) for image in array]
