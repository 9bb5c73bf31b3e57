"""Dataset manifests: the text contract shared by dataset builders and the trainer."""
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
import enum
import os
from typing import (
    Dict,
    List,
    Optional,
    Sequence,
    Tuple,
)
from stegogan.errors import ManifestError

ABSENT = '-'
_HEADER_KEYS = ('split', 'unmatchable_ratio', 'source_dir', 'target_dir')


class Split(enum.Enum):
    """Dataset split a manifest describes."""

    TRAIN = 'train'
    TEST = 'test'


@dataclasses.dataclass(frozen=True)
class ManifestRecord:
    """One manifest body line.

    Args:
        source_id: File name of the domain X image or None
        target_id: File name of the domain Y image or None
        mask_path: Ground-truth mask of the target image, relative to the manifest, or None
    """

    source_id: Optional[str]
    target_id: Optional[str]
    mask_path: Optional[str] = None

    def to_line(self) -> str:
        """Serialise to a tab separated line without newline"""
        return '\t'.join(ABSENT if value is None else value
                         for value in (self.source_id, self.target_id, self.mask_path))

    @classmethod
    def from_line(cls, line: str) -> 'ManifestRecord':
        """Parse a tab separated body line

        Args:
            line: The line without trailing newline

        Returns:
            ManifestRecord

        Raises:
            ManifestError: Wrong number of fields
        """
        fields = line.split('\t')
        if len(fields) != 3:
            raise ManifestError('Manifest record needs 3 tab separated fields: {!r}'.format(line))
        values = [None if value == ABSENT else value for value in fields]
        return cls(source_id=values[0], target_id=values[1], mask_path=values[2])


@dataclasses.dataclass(frozen=True)
class DatasetManifest:
    """Declarative description of a train or test split.

    ``root`` is the directory relative paths are resolved against; it is not serialised.
    """

    source_dir: str
    target_dir: str
    records: Tuple[ManifestRecord, ...]
    unmatchable_ratio: float = 0.0
    split: Split = Split.TRAIN
    root: str = dataclasses.field(default='', compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'records', tuple(self.records))
        if not 0.0 <= self.unmatchable_ratio <= 1.0:
            raise ManifestError('unmatchable_ratio must lie in [0, 1], got {}'.format(
                self.unmatchable_ratio))
        for record in self.records:
            for value in (record.source_id, record.target_id, record.mask_path):
                if value is not None and (value == ABSENT or '\t' in value or '\n' in value):
                    raise ManifestError('Invalid manifest entry {!r}'.format(value))
            if record.source_id is None and record.target_id is None:
                raise ManifestError('Manifest record without source and target')
            if self.split is Split.TEST and (record.source_id is None
                                             or record.target_id is None):
                raise ManifestError('Test manifests must be paired, got {}'.format(record))

    @property
    def pairs(self) -> List[Tuple[Optional[str], Optional[str]]]:
        """(source_id, target_id) tuples in record order"""
        return [(record.source_id, record.target_id) for record in self.records]

    @property
    def source_ids(self) -> List[str]:
        """Source image ids in record order"""
        return [record.source_id for record in self.records if record.source_id is not None]

    @property
    def target_ids(self) -> List[str]:
        """Target image ids in record order"""
        return [record.target_id for record in self.records if record.target_id is not None]

    def mask_paths(self) -> Dict[str, Optional[str]]:
        """Map target ids to resolved ground-truth mask paths

        Returns:
            Dict[str, Optional[str]]
        """
        return {record.target_id: (None if record.mask_path is None
                                   else self._resolve(record.mask_path))
                for record in self.records if record.target_id is not None}

    def source_path(self, source_id: str) -> str:
        """Resolved file path of a source image"""
        return self._resolve(os.path.join(self.source_dir, source_id))

    def target_path(self, target_id: str) -> str:
        """Resolved file path of a target image"""
        return self._resolve(os.path.join(self.target_dir, target_id))

    def _resolve(self, path: str) -> str:
        if os.path.isabs(path):
            return path
        return os.path.join(self.root, path)

    def dumps(self) -> str:
        """Serialise the manifest

        Returns:
            str: header ``key=value`` lines followed by one tab separated line per record
        """
        header = {'split': self.split.value,
                  'unmatchable_ratio': repr(float(self.unmatchable_ratio)),
                  'source_dir': self.source_dir,
                  'target_dir': self.target_dir}
        lines = ['{}={}'.format(key, header[key]) for key in _HEADER_KEYS]
        lines.extend(record.to_line() for record in self.records)
        return '\n'.join(lines) + '\n'

    @classmethod
    def loads(cls, text: str, root: str = '') -> 'DatasetManifest':
        """Parse a serialised manifest

        Args:
            text: Manifest text
            root: Directory relative paths are resolved against

        Returns:
            DatasetManifest

        Raises:
            ManifestError: Missing or unknown header keys, malformed records
        """
        header: Dict[str, str] = dict()
        records: List[ManifestRecord] = list()
        for line in text.splitlines():
            if not line:
                continue
            if '\t' in line:
                records.append(ManifestRecord.from_line(line))
            elif '=' in line and not records:
                key, value = line.split('=', 1)
                if key not in _HEADER_KEYS:
                    raise ManifestError('Unknown manifest header key {}'.format(key))
                header[key] = value
            else:
                raise ManifestError('Cannot parse manifest line {!r}'.format(line))
        missing = [key for key in _HEADER_KEYS if key not in header]
        if missing:
            raise ManifestError('Manifest header misses {}'.format(', '.join(missing)))
        try:
            split = Split(header['split'])
            ratio = float(header['unmatchable_ratio'])
        except ValueError as error:
            raise ManifestError('Invalid manifest header: {}'.format(error)) from error
        return cls(source_dir=header['source_dir'], target_dir=header['target_dir'],
                   records=tuple(records), unmatchable_ratio=ratio, split=split, root=root)

    def write(self, path: str) -> None:
        """Write the manifest as UTF-8 text

        Args:
            path: Target file
        """
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as fo:
            fo.write(self.dumps())

    @classmethod
    def read(cls, path: str) -> 'DatasetManifest':
        """Read a manifest; relative paths resolve against its directory

        Args:
            path: Manifest file

        Returns:
            DatasetManifest
        """
        with open(path, 'r', encoding='utf-8') as fi:
            text = fi.read()
        return cls.loads(text, root=os.path.dirname(os.path.abspath(path)))


def unpaired_records(source_ids: Sequence[str], target_ids: Sequence[str],
                     mask_paths: Optional[Dict[str, str]] = None) -> Tuple[ManifestRecord, ...]:
    """Lay out two independent id lists as manifest records

    The lists are zipped line by line; the shorter one is padded with absent entries.

    Args:
        source_ids: Domain X ids
        target_ids: Domain Y ids
        mask_paths: Optional mask path per target id

    Returns:
        Tuple[ManifestRecord, ...]
    """
    mask_paths = dict() if mask_paths is None else mask_paths
    records = list()
    for index in range(max(len(source_ids), len(target_ids))):
        source_id = source_ids[index] if index < len(source_ids) else None
        target_id = target_ids[index] if index < len(target_ids) else None
        mask = mask_paths.get(target_id) if target_id is not None else None
        records.append(ManifestRecord(source_id=source_id, target_id=target_id, mask_path=mask))
    return tuple(records)
