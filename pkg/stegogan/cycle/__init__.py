"""Backward and forward cycles, consistency masks and inference.

.. autosummary::
    :toctree: generated/

    disentangle
    perturb
    backward_cycle
    forward_cycle
    run_cycles
    consistency_mask
    translate

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

from stegogan.cycle.stego_cycle import (
    attach_identity,
    backward_cycle,
    consistency_mask,
    disentangle,
    forward_cycle,
    perturb,
    run_cycles,
    translate,
    unmatchable_footprint,
)
