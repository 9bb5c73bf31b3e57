"""Sensitivity of back-translation to low-amplitude perturbations of x_gen."""
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
    List,
    Optional,
    Sequence,
)
import torch
from stegogan.cycle.stego_cycle import backward_cycle
from stegogan.domain.domain_model import Hyperparameters
from stegogan.errors import ShapeMismatchError
from stegogan.networks.networks import StegoNetworks

PROBE_COLUMNS = ('amplitude', 'unmatchable', 'matchable', 'overall')


@dataclasses.dataclass(frozen=True)
class ProbeRow:
    """Mean absolute reconstruction error of y_rec for one amplitude; None for empty regions."""

    amplitude: float
    unmatchable: Optional[float]
    matchable: Optional[float]
    overall: float


@dataclasses.dataclass(frozen=True)
class ProbeTable:
    """Sensitivity curve of a model."""

    rows: List[ProbeRow]

    def to_lines(self) -> List[str]:
        """Whitespace separated table with header, n/a for undefined cells"""
        lines = [' '.join(PROBE_COLUMNS)]
        for row in self.rows:
            cells = [getattr(row, name) for name in PROBE_COLUMNS]
            lines.append(' '.join('n/a' if cell is None else '{:.6g}'.format(cell)
                                  for cell in cells))
        return lines


def _region_error(error: torch.Tensor, region: torch.Tensor) -> Optional[float]:
    count = float(region.sum())
    if count == 0:
        return None
    return float((error * region).sum() / count)


def steganography_probe(nets: StegoNetworks, y_samples: torch.Tensor, gt_masks: torch.Tensor,
                        amplitudes: Sequence[float], hp: Optional[Hyperparameters] = None,
                        use_mask: bool = True, seed: int = 0) -> ProbeTable:
    """Reconstruction error of y_rec while x_gen is perturbed with increasing noise

    Errors are mean absolute differences in normalised units, averaged over channels and split
    by the ground-truth unmatchable region. Every amplitude draws its noise from the same seed.

    Args:
        nets: Trained networks
        y_samples: N x C x H x W domain Y images in [-1, 1]
        gt_masks: N x H x W boolean unmatchable regions
        amplitudes: Noise standard deviations
        hp: Hyperparameters, defaults when None
        use_mask: False probes a baseline model
        seed: Noise seed

    Returns:
        ProbeTable

    Raises:
        ShapeMismatchError: Masks do not match the samples
    """
    hp = Hyperparameters() if hp is None else hp
    region = torch.as_tensor(gt_masks, dtype=y_samples.dtype, device=y_samples.device)
    if region.shape != (y_samples.shape[0],) + tuple(y_samples.shape[2:]):
        raise ShapeMismatchError('Masks {} do not match samples {}'.format(
            tuple(region.shape), tuple(y_samples.shape)))
    nets.eval()
    rows = list()
    with torch.no_grad():
        for amplitude in amplitudes:
            generator = torch.Generator(device=y_samples.device).manual_seed(seed)
            result = backward_cycle(y_samples, nets, hp, generator=generator, use_mask=use_mask,
                                    amplitude=float(amplitude))
            error = (result.y_rec - y_samples).abs().mean(dim=1)
            rows.append(ProbeRow(amplitude=float(amplitude),
                                 unmatchable=_region_error(error, region),
                                 matchable=_region_error(error, 1.0 - region),
                                 overall=float(error.mean())))
    return ProbeTable(rows)
