"""StegoGAN: unpaired image translation for non-bijective domains.

Disentangles unmatchable target-domain features with a learned mask so that the generator does
not hallucinate content without source-domain counterpart. Builds controlled datasets, trains
the model or its CycleGAN baseline, and evaluates fidelity and hallucination rates.

.. autosummary::
    :toctree: generated/

    domain
    networks
    cycle
    objectives
    training
    data
    evaluation
    cli

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
from stegogan.__version__ import __version__
from stegogan.errors import (
    StegoGanError,
    ConfigurationError,
    SchemaMismatchError,
    ShapeMismatchError,
    ImageTooSmallError,
    ManifestError,
    NonFiniteLossError,
)
from stegogan.domain import (
    Hyperparameters,
    ImageTensor,
    DatasetManifest,
    TranslationBundle,
)
from stegogan.networks import (
    StegoNetworks,
    build_networks,
)
from stegogan.cycle import (
    backward_cycle,
    forward_cycle,
    translate,
)
from stegogan.objectives import (
    LossReport,
    total_generator_loss,
    discriminator_loss,
)
from stegogan.training import (
    TrainConfig,
    train,
    resume,
)
