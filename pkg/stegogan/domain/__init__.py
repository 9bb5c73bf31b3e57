"""Shared value types, dataset manifests and image files.

.. autosummary::
    :toctree: generated/

    ImageTensor
    TranslationBundle
    Hyperparameters
    DatasetManifest
    normalize_image
    denormalize_image

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

from stegogan.domain.domain_model import (
    ALLOWED_CHANNELS,
    DATASET_PRESETS,
    BackwardCycleResult,
    ConsistencyMask,
    DomainTag,
    FeatureMap,
    ForwardCycleResult,
    Hyperparameters,
    ImageTensor,
    TranslationBundle,
    UnmatchabilityMask,
    denormalize_image,
    normalize_image,
)
from stegogan.domain.manifest import (
    DatasetManifest,
    ManifestRecord,
    Split,
    unpaired_records,
)
from stegogan.domain.image_io import (
    batch_to_uint8,
    list_images,
    load_batch,
    read_image,
    read_mask,
    write_image,
    write_mask,
)
