"""Configuration helpers shared by all configuration objects."""
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
import os
from typing import (
    Any,
    Dict,
    Mapping,
    Type,
    TypeVar,
)
import yaml
from stegogan.errors import ConfigurationError

_ConfigType = TypeVar('_ConfigType', bound='ConfigMixin')


def config_field(default: Any, doc: str) -> Any:
    """Declare a configuration field with its default value and documentation.

    Args:
        default: The default value
        doc: Human readable description of the field

    Returns:
        Any: dataclass field
    """
    return dataclasses.field(default=default, metadata={'doc': doc})


class ConfigMixin:
    """Round trip between frozen configuration dataclasses and plain mappings."""

    @classmethod
    def config_docs(cls) -> Dict[str, Dict[str, Any]]:
        """Return the documentation and default of every field

        Returns:
            Dict[str, Dict[str, Any]]: field name to {'doc', 'default'}
        """
        docs = dict()
        for f in dataclasses.fields(cls):  # type: ignore
            default = f.default
            if default is dataclasses.MISSING and f.default_factory is not dataclasses.MISSING:
                default = f.default_factory()
            docs[f.name] = {'doc': f.metadata.get('doc', ''), 'default': default}
        return docs

    @classmethod
    def from_config(cls: Type[_ConfigType], config: Mapping[str, Any]) -> _ConfigType:
        """Create an instance from a configuration mapping

        Args:
            config: Mapping of field names to values, missing fields take their defaults

        Returns:
            the configuration object

        Raises:
            ConfigurationError: Unknown keys in config
        """
        known = {f.name for f in dataclasses.fields(cls)}  # type: ignore
        unknown = sorted(set(config) - known)
        if unknown:
            raise ConfigurationError(
                'Unknown configuration keys for {}: {}'.format(cls.__name__, ', '.join(unknown)))
        return cls(**dict(config))  # type: ignore

    def to_config(self) -> Dict[str, Any]:
        """Create a plain configuration mapping from the instance

        Returns:
            Dict[str, Any]
        """
        return dataclasses.asdict(self)  # type: ignore


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a YAML configuration file

    Args:
        path: Location of the file

    Returns:
        Dict[str, Any]: the parsed top level mapping (empty for an empty file)

    Raises:
        ConfigurationError: The file does not contain a mapping
    """
    with open(os.path.expanduser(path), 'r', encoding='utf-8') as fi:
        content = yaml.safe_load(fi)
    if content is None:
        return dict()
    if not isinstance(content, dict):
        raise ConfigurationError('Configuration file {} must hold a mapping'.format(path))
    return content


def dump_config_file(config: Mapping[str, Any], path: str) -> None:
    """Write a configuration mapping as YAML

    Args:
        config: The mapping to write
        path: Target file
    """
    with open(os.path.expanduser(path), 'w', encoding='utf-8') as fo:
        yaml.safe_dump(dict(config), fo, sort_keys=True, default_flow_style=False)
