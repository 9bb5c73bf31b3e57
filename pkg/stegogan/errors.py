"""Exceptions raised by stegogan."""
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
from typing import Optional


class StegoGanError(Exception):
    """Base class of all errors raised by stegogan."""


class ConfigurationError(StegoGanError, ValueError):
    """Invalid hyperparameters, unknown configuration keys or incompatible networks."""


class SchemaMismatchError(ConfigurationError):
    """Checkpoint written with a different schema version."""


class ShapeMismatchError(StegoGanError, ValueError):
    """Arrays or tensors violate a shape contract."""


class ImageTooSmallError(ShapeMismatchError):
    """Image smaller than the smallest input a network accepts."""


class ManifestError(StegoGanError, ValueError):
    """Malformed dataset manifest or a dataset that cannot be built as requested."""


class NonFiniteLossError(StegoGanError, RuntimeError):
    """A loss component evaluated to NaN or infinity.

    Args:
        component: Name of the offending loss component
        value: The non-finite value
    """

    def __init__(self, component: str, value: Optional[float] = None) -> None:
        self.component = component
        self.value = value
        super().__init__('Loss component {} is not finite ({})'.format(component, value))
