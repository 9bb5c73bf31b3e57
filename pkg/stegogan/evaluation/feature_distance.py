"""Distribution distances between real and generated image sets."""
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
import logging
from typing import (
    Callable,
    Optional,
    Sequence,
)
import numpy as np
import torch
from scipy import linalg
from torch import nn

logger = logging.getLogger(__name__)

FeatureExtractor = Callable[[Sequence[np.ndarray]], np.ndarray]
KID_SUBSET_SIZE = 100
KID_SUBSETS = 10
EMBEDDER_SEED = 1234


@dataclasses.dataclass(frozen=True)
class FeatureDistances:
    """FID and KID (scaled by 1000) of two image sets."""

    fid: float
    kid: float


def _images_to_batch(images: Sequence[np.ndarray]) -> torch.Tensor:
    batch = np.stack([np.asarray(image, dtype=np.float32) for image in images])
    if batch.ndim == 3:
        batch = batch[:, :, :, None]
    return torch.from_numpy(batch / 127.5 - 1.0).permute(0, 3, 1, 2).contiguous()


class RandomConvEmbedder(nn.Module):
    """Small convolutional embedder with frozen weights drawn from a fixed seed

    Args:
        in_channels: Image channels
        features: Output dimension
        seed: Seed of the weights
    """

    def __init__(self, in_channels: int = 3, features: int = 64,
                 seed: int = EMBEDDER_SEED) -> None:
        super().__init__()
        self.in_channels = in_channels
        self.body = nn.Sequential(
            nn.Conv2d(in_channels, 16, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
            nn.Conv2d(16, 32, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
            nn.Conv2d(32, features, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
            nn.AdaptiveAvgPool2d(1),
            nn.Flatten(),
        )
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for parameter in self.body.parameters():
                fan_in = parameter[0].numel() if parameter.dim() > 1 else 1
                parameter.copy_(torch.randn(parameter.shape, generator=generator)
                                / np.sqrt(fan_in))
                parameter.requires_grad_(False)
        self.eval()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)

    def embed(self, images: Sequence[np.ndarray], batch_size: int = 64) -> np.ndarray:
        """Embed 0-255 H x W x C images

        Args:
            images: The images
            batch_size: Images per forward pass

        Returns:
            np.ndarray: N x features float64
        """
        outputs = list()
        with torch.no_grad():
            for start in range(0, len(images), batch_size):
                batch = _images_to_batch(images[start:start + batch_size])
                outputs.append(self.body(batch).double().numpy())
        return np.concatenate(outputs, axis=0)


def inception_extractor(device: str = 'cpu') -> FeatureExtractor:
    """Pool features of the pretrained Inception v3 network

    Needs the optional torchvision dependency and downloads weights on first use.

    Args:
        device: Torch device

    Returns:
        FeatureExtractor: maps 0-255 images to N x 2048 features
    """
    from torchvision.models import Inception_V3_Weights, inception_v3

    model = inception_v3(weights=Inception_V3_Weights.DEFAULT)
    model.fc = nn.Identity()
    model.eval().to(device)
    mean = torch.tensor([0.485, 0.456, 0.406], device=device).view(1, 3, 1, 1)
    std = torch.tensor([0.229, 0.224, 0.225], device=device).view(1, 3, 1, 1)

    def extract(images: Sequence[np.ndarray]) -> np.ndarray:
        outputs = list()
        with torch.no_grad():
            for start in range(0, len(images), 32):
                batch = (_images_to_batch(images[start:start + 32]).to(device) + 1.0) / 2.0
                if batch.shape[1] == 1:
                    batch = batch.repeat(1, 3, 1, 1)
                batch = torch.nn.functional.interpolate(batch, size=(299, 299),
                                                        mode='bilinear', align_corners=False)
                outputs.append(model((batch - mean) / std).double().cpu().numpy())
        return np.concatenate(outputs, axis=0)
    return extract


def frechet_distance(features_1: np.ndarray, features_2: np.ndarray,
                     eps: float = 1e-6) -> float:
    """Fréchet distance between Gaussian fits of two feature sets

    ||mu_1 - mu_2||^2 + trace(S_1 + S_2 - 2 (S_1 S_2)^(1/2)). A diagonal jitter of eps is added
    when the product of the covariances is singular.

    Args:
        features_1: N x D features
        features_2: M x D features
        eps: Diagonal jitter

    Returns:
        float
    """
    mu_1, mu_2 = features_1.mean(axis=0), features_2.mean(axis=0)
    sigma_1 = np.atleast_2d(np.cov(features_1, rowvar=False))
    sigma_2 = np.atleast_2d(np.cov(features_2, rowvar=False))
    covmean = linalg.sqrtm(sigma_1.dot(sigma_2))
    if not np.isfinite(covmean).all():
        logger.warning('Singular covariance product, adding %g to the diagonal', eps)
        offset = np.eye(sigma_1.shape[0]) * eps
        covmean = linalg.sqrtm((sigma_1 + offset).dot(sigma_2 + offset))
    if np.iscomplexobj(covmean):
        covmean = covmean.real
    difference = mu_1 - mu_2
    return float(difference.dot(difference) + np.trace(sigma_1) + np.trace(sigma_2)
                 - 2.0 * np.trace(covmean))


def _polynomial_mmd(features_1: np.ndarray, features_2: np.ndarray) -> float:
    dimension = features_1.shape[1]
    k_11 = (features_1 @ features_1.T / dimension + 1.0) ** 3
    k_22 = (features_2 @ features_2.T / dimension + 1.0) ** 3
    k_12 = (features_1 @ features_2.T / dimension + 1.0) ** 3
    m = features_1.shape[0]
    n = features_2.shape[0]
    term_11 = (k_11.sum() - np.trace(k_11)) / (m * (m - 1))
    term_22 = (k_22.sum() - np.trace(k_22)) / (n * (n - 1))
    return float(term_11 + term_22 - 2.0 * k_12.mean())


def kernel_inception_distance(features_1: np.ndarray, features_2: np.ndarray,
                              subset_size: int = KID_SUBSET_SIZE, n_subsets: int = KID_SUBSETS,
                              seed: int = 0) -> float:
    """Unbiased cubic polynomial kernel MMD^2 averaged over random subsets

    Args:
        features_1: N x D features
        features_2: M x D features
        subset_size: Subset size, capped by the smaller set
        n_subsets: Number of subsets
        seed: Subset sampling seed

    Returns:
        float: KID, not scaled
    """
    size = min(subset_size, len(features_1), len(features_2))
    if size < 2:
        raise ValueError('KID needs at least two samples per set')
    rng = np.random.default_rng(seed)
    estimates = list()
    for _ in range(n_subsets):
        first = features_1[rng.choice(len(features_1), size, replace=False)]
        second = features_2[rng.choice(len(features_2), size, replace=False)]
        estimates.append(_polynomial_mmd(first, second))
    return float(np.mean(estimates))


def fid_kid(real: Sequence[np.ndarray], fake: Sequence[np.ndarray],
            feature_extractor: Optional[FeatureExtractor] = None,
            subset_size: int = KID_SUBSET_SIZE, n_subsets: int = KID_SUBSETS,
            seed: int = 0) -> FeatureDistances:
    """FID and KID x 1000 of two image sets

    Args:
        real: 0-255 images
        fake: 0-255 images
        feature_extractor: Embedding function, a seeded RandomConvEmbedder when None
        subset_size: KID subset size
        n_subsets: KID subset count
        seed: KID subset sampling seed

    Returns:
        FeatureDistances

    Raises:
        ValueError: Fewer than two images in a set
    """
    if len(real) < 2 or len(fake) < 2:
        raise ValueError('FID and KID need at least two images per set')
    if feature_extractor is None:
        channels = 1 if np.asarray(real[0]).ndim == 2 else np.asarray(real[0]).shape[2]
        feature_extractor = RandomConvEmbedder(in_channels=channels).embed
    features_real = np.asarray(feature_extractor(real), dtype=np.float64)
    features_fake = np.asarray(feature_extractor(fake), dtype=np.float64)
    return FeatureDistances(
        fid=frechet_distance(features_real, features_fake),
        kid=1000.0 * kernel_inception_distance(features_real, features_fake, subset_size,
                                               n_subsets, seed))
