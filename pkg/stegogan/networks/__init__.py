"""Generators, mask predictor and discriminators.

.. autosummary::
    :toctree: generated/

    SplitGenerator
    MaskPredictor
    PatchDiscriminator
    StegoNetworks
    build_generator
    build_mask_predictor
    build_discriminator
    build_networks
    discriminate

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

from stegogan.networks.networks import (
    CHECKPOINT_NAMES,
    N_RESIDUAL_BLOCKS,
    MaskPredictor,
    PatchDiscriminator,
    ResidualBlock,
    SplitGenerator,
    StegoNetworks,
    build_discriminator,
    build_generator,
    build_mask_predictor,
    build_networks,
    discriminate,
    init_weights,
)
