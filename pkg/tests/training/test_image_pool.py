"""Testing the replay buffer"""
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
import pytest
import sys
import numpy as np
import torch
from stegogan.training import ImagePool


def batch(value: float, n: int = 1) -> torch.Tensor:
    return torch.full((n, 3, 4, 4), value)


def test_disabled_pool_passes_through():
    """Testing that a pool of size 0 returns its input"""
    pool = ImagePool(0)
    images = batch(1.0, 3)
    assert pool.query(images) is images
    assert len(pool) == 0


def test_pool_fills_before_swapping():
    """Testing that images are returned unchanged until the pool is full"""
    pool = ImagePool(3, np.random.default_rng(0))
    for value in range(3):
        assert torch.equal(pool.query(batch(float(value))), batch(float(value)))
    assert len(pool) == 3
    returned = pool.query(batch(9.0, 2))
    assert returned.shape == (2, 3, 4, 4)
    assert len(pool) == 3


def test_pool_swaps_about_half():
    """Testing that a full pool returns history about half of the time"""
    pool = ImagePool(5, np.random.default_rng(1))
    pool.query(batch(-1.0, 5))
    trials = 4000
    swapped = 0
    for index in range(trials):
        if float(pool.query(batch(float(index)))[0, 0, 0, 0]) != float(index):
            swapped += 1
    assert 0.45 < swapped / trials < 0.55


def test_pool_state_restores_sequence():
    """Testing that a restored pool continues identically"""
    pool = ImagePool(2, np.random.default_rng(2))
    for value in range(4):
        pool.query(batch(float(value)))
    state = pool.state_dict()
    expected = [pool.query(batch(float(value))) for value in range(10, 20)]
    restored = ImagePool(2, np.random.default_rng(123))
    restored.load_state_dict(state)
    for value, reference in zip(range(10, 20), expected):
        assert torch.equal(restored.query(batch(float(value))), reference)


def test_negative_pool_size():
    """Testing that negative pool sizes are rejected"""
    with pytest.raises(ValueError):
        ImagePool(-1)


if __name__ == '__main__':
    pytest.main(sys.argv)
