"""Loss terms and composed objectives.

.. autosummary::
    :toctree: generated/

    adversarial_loss
    cycle_loss
    identity_loss
    mask_regularization
    matchable_consistency_loss
    total_generator_loss
    discriminator_loss
    LossReport

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

from stegogan.objectives.objectives import (
    GAN_MODES,
    LOG_COLUMNS,
    DiscriminatorScores,
    LossReport,
    adversarial_loss,
    check_finite,
    cycle_loss,
    discriminator_loss,
    identity_loss,
    identity_weight,
    mask_regularization,
    matchable_consistency_loss,
    total_generator_loss,
)
