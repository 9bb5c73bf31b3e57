"""Training loop, replay buffers and checkpoints.

.. autosummary::
    :toctree: generated/

    TrainConfig
    StegoTrainer
    ImagePool
    train
    resume
    load_networks

"""
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

from stegogan.training.train_config import (
    LR_SCHEDULES,
    MODELS,
    TrainConfig,
)
from stegogan.training.image_pool import ImagePool
from stegogan.training.checkpoint import (
    LATEST_CHECKPOINT,
    SCHEMA_VERSION,
    check_compatible,
    load_checkpoint,
    load_networks,
    save_checkpoint,
)
from stegogan.training.trainer import (
    LOSS_LOG,
    NAN_DUMP,
    StegoTrainer,
    TrainResult,
    configure_determinism,
    linear_decay_factor,
    resume,
    set_requires_grad,
    train,
)
