"""Checkpoint archives of training runs."""
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
    Any,
    Dict,
    Tuple,
)
import torch
from stegogan.__version__ import __version__
from stegogan.errors import ConfigurationError, SchemaMismatchError
from stegogan.networks.networks import StegoNetworks, build_networks
from stegogan.training.train_config import TrainConfig

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
LATEST_CHECKPOINT = 'latest.pt'
NUMBERED_CHECKPOINT = 'checkpoint_{:08d}.pt'
_STRUCTURAL_FIELDS = ('input_nc', 'output_nc', 'ngf', 'ndf', 'encoder_depth')


def save_checkpoint(path: str, state: Dict[str, Any]) -> str:
    """Write a checkpoint archive

    The schema and package versions are added to ``state``. The archive is written to a
    temporary file first and moved into place.

    Args:
        path: Target file
        state: Networks, optimisers, schedulers, configuration, counters and RNG states

    Returns:
        str: path
    """
    archive = dict(state)
    archive['schema_version'] = SCHEMA_VERSION
    archive['package_version'] = __version__
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + '.tmp'
    torch.save(archive, tmp_path)
    os.replace(tmp_path, path)
    logger.debug('Wrote checkpoint %s at iteration %s', path, archive.get('iteration'))
    return path


def load_checkpoint(path: str, device: str = 'cpu') -> Dict[str, Any]:
    """Read a checkpoint archive and check its schema version

    Args:
        path: Checkpoint file
        device: Device tensors are mapped to

    Returns:
        Dict[str, Any]: the archive

    Raises:
        SchemaMismatchError: The archive was written with another schema
    """
    archive = torch.load(os.path.expanduser(path), map_location=device, weights_only=True)
    version = archive.get('schema_version') if isinstance(archive, dict) else None
    if version != SCHEMA_VERSION:
        raise SchemaMismatchError('Checkpoint {} has schema version {}, expected {}'.format(
            path, version, SCHEMA_VERSION))
    return archive


def check_compatible(saved: TrainConfig, requested: TrainConfig) -> None:
    """Check that a configuration can continue from a checkpoint

    Args:
        saved: Configuration stored in the checkpoint
        requested: Configuration of the resumed run

    Raises:
        ConfigurationError: Network structure or model differ
    """
    for name in _STRUCTURAL_FIELDS:
        if getattr(saved.hp, name) != getattr(requested.hp, name):
            raise ConfigurationError('Cannot resume: {} is {} in the checkpoint but {} '
                                     'requested'.format(name, getattr(saved.hp, name),
                                                        getattr(requested.hp, name)))
    if saved.hp.latent_channels != requested.hp.latent_channels:
        raise ConfigurationError('Cannot resume: latent channels differ')
    if saved.model != requested.model:
        raise ConfigurationError('Cannot resume a {} checkpoint as {}'.format(
            saved.model, requested.model))


def load_networks(path: str, device: str = 'cpu') -> Tuple[StegoNetworks, TrainConfig]:
    """Rebuild the trained networks of a checkpoint

    Args:
        path: Checkpoint file
        device: Target device

    Returns:
        Tuple[StegoNetworks, TrainConfig]: networks in evaluation mode and the run configuration
    """
    archive = load_checkpoint(path, device)
    config = TrainConfig.from_config(archive['config'])
    nets = build_networks(config.hp)
    for name, network in nets.named_networks().items():
        network.load_state_dict(archive['networks'][name])
    nets.to(device)
    nets.eval()
    return nets, config
