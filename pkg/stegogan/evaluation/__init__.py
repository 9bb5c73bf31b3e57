"""Metrics, distribution distances, steganography probe and mask export.

.. autosummary::
    :toctree: generated/

    rmse
    accuracy_at
    false_positive_rates
    mask_quality
    fid_kid
    steganography_probe
    export_masks
    evaluate_directories

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

from stegogan.evaluation.metrics import (
    MIN_INSTANCE_PX,
    MaskScores,
    accuracy_at,
    false_positive_rates,
    mask_quality,
    mean_mask_quality,
    rmse,
)
from stegogan.evaluation.feature_distance import (
    FeatureDistances,
    RandomConvEmbedder,
    fid_kid,
    frechet_distance,
    inception_extractor,
    kernel_inception_distance,
)
from stegogan.evaluation.probe import (
    ProbeRow,
    ProbeTable,
    steganography_probe,
)
from stegogan.evaluation.masks import (
    CONSISTENCY,
    FOOTPRINT,
    LATENT_MASK,
    X_GEN,
    Y_GEN,
    export_masks,
    predict_footprints,
)
from stegogan.evaluation.report import (
    DETECTORS,
    METRICS,
    evaluate_directories,
    format_report,
    write_report,
)
