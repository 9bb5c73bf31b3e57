"""Dataset builders.

.. autosummary::
    :toctree: generated/

    SyntheticWorldConfig
    build_synthetic
    detect_highway_pixels
    detect_glyph_pixels
    build_ratio_dataset
    build_paired_manifest
    derive_toponym_mask
    build_toponym_masks
    label_mri_slice
    build_mri_dataset

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

from stegogan.data.protocols import (
    HIGHWAY_COLOR,
    HIGHWAY_TOLERANCE,
    SliceLabel,
    build_mri_dataset,
    build_paired_manifest,
    build_ratio_dataset,
    build_toponym_masks,
    derive_toponym_mask,
    detect_color_pixels,
    detect_highway_pixels,
    exact_count,
    label_mri_slice,
)
from stegogan.data.synthetic import (
    GLYPH_COLOR,
    SyntheticDataset,
    SyntheticWorldConfig,
    build_synthetic,
    detect_glyph_pixels,
    invert_restyle,
    random_scene,
    render_source,
    restyle,
    stamp_glyphs,
)
