"""Training configuration."""
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
    Any,
    Dict,
    Mapping,
    Optional,
)
from stegogan.config import ConfigMixin, config_field
from stegogan.domain.domain_model import Hyperparameters
from stegogan.errors import ConfigurationError
from stegogan.objectives.objectives import GAN_MODES

LR_SCHEDULES = ('constant', 'linear_decay')
MODELS = ('stegogan', 'cyclegan')


@dataclasses.dataclass(frozen=True)
class TrainConfig(ConfigMixin):
    """Everything a training run needs besides the data."""

    hp: Hyperparameters = dataclasses.field(default_factory=Hyperparameters,
                                            metadata={'doc': 'Model hyperparameters'})
    gan_mode: str = config_field('lsgan', 'Adversarial loss, lsgan or vanilla')
    seed: int = config_field(0, 'Seed of weights, sampling order, noise and replay buffers')
    checkpoint_every: int = config_field(
        0, 'Write a numbered checkpoint every this many iterations, 0 for epoch ends only')
    lr_schedule: str = config_field(
        'constant', 'constant, or linear_decay over the second half of the epochs')
    pool_size: int = config_field(50, 'Replay buffer size per discriminator, 0 disables it')
    adv_on_clean: bool = config_field(
        True, 'Also feed y_gen_clean to D_Y and to the generator adversarial loss')
    model: str = config_field(
        'stegogan', 'stegogan, or cyclegan for the baseline without mask and injection')
    identity_weight_absolute: bool = config_field(
        False, 'Weight the identity loss by lambda_id instead of lambda_id * lambda_cyc')
    deterministic: bool = config_field(False, 'Enforce deterministic kernels')
    max_iterations: Optional[int] = config_field(
        None, 'Stop after this many global iterations, None for the full schedule')
    device: str = config_field('cpu', 'Torch device of the run')

    def __post_init__(self) -> None:
        if isinstance(self.hp, Mapping):
            object.__setattr__(self, 'hp', Hyperparameters.from_config(self.hp))
        if self.gan_mode not in GAN_MODES:
            raise ConfigurationError('gan_mode must be one of {}'.format(GAN_MODES))
        if self.lr_schedule not in LR_SCHEDULES:
            raise ConfigurationError('lr_schedule must be one of {}'.format(LR_SCHEDULES))
        if self.model not in MODELS:
            raise ConfigurationError('model must be one of {}'.format(MODELS))
        if self.pool_size < 0:
            raise ConfigurationError('pool_size must be non-negative')
        if self.checkpoint_every < 0:
            raise ConfigurationError('checkpoint_every must be non-negative')
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ConfigurationError('max_iterations must be non-negative')

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> 'TrainConfig':
        """Create a training configuration from a mapping

        Hyperparameters are accepted nested under ``hp`` or as flat top level keys; flat keys
        override nested ones.

        Args:
            config: The mapping

        Returns:
            TrainConfig

        Raises:
            ConfigurationError: Unknown keys or invalid values
        """
        own = {f.name for f in dataclasses.fields(cls)}
        hp_keys = {f.name for f in dataclasses.fields(Hyperparameters)}
        hp_config: Dict[str, Any] = dict(config.get('hp') or dict())
        train_config: Dict[str, Any] = dict()
        unknown = list()
        for key, value in config.items():
            if key == 'hp':
                continue
            if key in own:
                train_config[key] = value
            elif key in hp_keys:
                hp_config[key] = value
            else:
                unknown.append(key)
        if unknown:
            raise ConfigurationError('Unknown configuration keys: {}'.format(
                ', '.join(sorted(unknown))))
        return cls(hp=Hyperparameters.from_config(hp_config), **train_config)

    @property
    def use_mask(self) -> bool:
        """Whether the unmatchability mask and feature injection are active"""
        return self.model == 'stegogan'

    def effective_hp(self) -> Hyperparameters:
        """Hyperparameters as used by the losses

        The baseline drops the mask terms and the perturbation.

        Returns:
            Hyperparameters
        """
        if self.use_mask:
            return self.hp
        return dataclasses.replace(self.hp, lambda_reg=0.0, lambda_match=0.0,
                                   epsilon_amplitude=0.0)

    def uses_identity(self) -> bool:
        """Identity loss needs equal channel counts and a positive weight"""
        return self.hp.lambda_id > 0 and self.hp.input_nc == self.hp.output_nc
