"""Testing image fidelity, hallucination and mask metrics"""
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
import numpy.testing as npt
from stegogan.errors import ShapeMismatchError
from stegogan.evaluation import (
    MaskScores,
    accuracy_at,
    false_positive_rates,
    mask_quality,
    mean_mask_quality,
    rmse,
)


def fixtures(seed: int, n: int = 3):
    rng = np.random.default_rng(seed)
    pred = [rng.integers(0, 256, size=(8, 8, 3)).astype(np.uint8) for _ in range(n)]
    target = [np.clip(image.astype(int) + rng.integers(-12, 13, size=(8, 8, 3)), 0, 255)
              .astype(np.uint8) for image in pred]
    return pred, target


def loop_rmse(pred, target) -> float:
    scores = list()
    for p, t in zip(pred, target):
        total = 0.0
        for i in range(8):
            for j in range(8):
                for c in range(3):
                    total += (float(p[i, j, c]) - float(t[i, j, c])) ** 2
        scores.append((total / 192) ** 0.5)
    return sum(scores) / len(scores)


def loop_accuracy(pred, target, sigma) -> float:
    scores = list()
    for p, t in zip(pred, target):
        correct = 0
        for i in range(8):
            for j in range(8):
                if all(abs(float(p[i, j, c]) - float(t[i, j, c])) < sigma for c in range(3)):
                    correct += 1
        scores.append(100.0 * correct / 64)
    return sum(scores) / len(scores)


def loop_components(flagged):
    """Sizes of 8-connected components by flood fill"""
    seen = np.zeros(flagged.shape, dtype=bool)
    sizes = list()
    for i in range(flagged.shape[0]):
        for j in range(flagged.shape[1]):
            if flagged[i, j] and not seen[i, j]:
                stack, size = [(i, j)], 0
                seen[i, j] = True
                while stack:
                    a, b = stack.pop()
                    size += 1
                    for da in (-1, 0, 1):
                        for db in (-1, 0, 1):
                            u, v = a + da, b + db
                            if 0 <= u < flagged.shape[0] and 0 <= v < flagged.shape[1] \
                                    and flagged[u, v] and not seen[u, v]:
                                seen[u, v] = True
                                stack.append((u, v))
                sizes.append(size)
    return sizes


def red_detector(image: np.ndarray) -> np.ndarray:
    return image[:, :, 0] > 200


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fidelity_metrics_against_loops(seed):
    """Testing RMSE and accuracy against scalar loops"""
    pred, target = fixtures(seed)
    npt.assert_allclose(rmse(pred, target), loop_rmse(pred, target), rtol=1e-12)
    for sigma in (1.0, 5.0, 10.0):
        npt.assert_allclose(accuracy_at(pred, target, sigma), loop_accuracy(pred, target, sigma),
                            rtol=1e-12)


def test_fidelity_metric_examples():
    """Testing RMSE and accuracy on constant images"""
    zeros = np.zeros((8, 8, 3), dtype=np.uint8)
    assert rmse(zeros, zeros) == 0.0
    assert accuracy_at(zeros, zeros, 5) == 100.0
    assert rmse(zeros, zeros + 3) == pytest.approx(3.0)
    assert accuracy_at(zeros, zeros + 5, 5) == 0.0
    assert accuracy_at(zeros, zeros + 4, 5) == 100.0
    with pytest.raises(ShapeMismatchError):
        rmse(zeros, np.zeros((8, 4, 3)))
    with pytest.raises(ValueError):
        accuracy_at(zeros, zeros, 0)


def test_accuracy_grows_with_sigma():
    """Testing that looser thresholds never lower the accuracy"""
    pred, target = fixtures(3, 5)
    scores = [accuracy_at(pred, target, sigma) for sigma in range(1, 30)]
    assert all(a <= b for a, b in zip(scores, scores[1:]))


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_false_positive_rates_against_loops(seed):
    """Testing pFPR and iFPR against flood fill"""
    rng = np.random.default_rng(seed)
    images = list()
    for _ in range(6):
        image = np.zeros((8, 8, 3), dtype=np.uint8)
        image[rng.uniform(size=(8, 8)) < 0.2, 0] = 255
        images.append(image)
    rates, instances = list(), 0
    for image in images:
        flagged = red_detector(image)
        rates.append(flagged.sum() / 64)
        if any(size >= 5 for size in loop_components(flagged)):
            instances += 1
    pfpr, ifpr = false_positive_rates(images, red_detector, 5)
    npt.assert_allclose(pfpr, np.mean(rates) * 1e4, rtol=1e-12)
    npt.assert_allclose(ifpr, 100.0 * instances / 6, rtol=1e-12)


def test_false_positive_rates_example():
    """Testing one ten pixel component among a hundred large images"""
    images = [np.zeros((256, 256, 3), dtype=np.uint8) for _ in range(100)]
    images[17][100, 40:50, 0] = 255
    pfpr, ifpr = false_positive_rates(images, red_detector)
    assert ifpr == pytest.approx(1.0)
    assert pfpr == pytest.approx(10 / 65536 / 100 * 1e4)
    assert round(pfpr, 4) == 0.0153


def test_diagonal_neighbours_form_one_instance():
    """Testing 8-connectivity and the minimum instance size"""
    image = np.zeros((8, 8, 3), dtype=np.uint8)
    for index in range(5):
        image[index, index, 0] = 255
    assert false_positive_rates([image], red_detector, 5)[1] == 100.0
    assert false_positive_rates([image], red_detector, 6)[1] == 0.0


def test_false_positive_rates_are_monotone():
    """Testing that flagging more pixels never lowers either rate"""
    rng = np.random.default_rng(4)
    images = [np.zeros((8, 8, 3), dtype=np.uint8) for _ in range(4)]
    previous = (0.0, 0.0)
    for _ in range(30):
        index = int(rng.integers(4))
        i, j = (int(value) for value in rng.integers(0, 8, size=2))
        images[index][i, j, 0] = 255
        current = false_positive_rates(images, red_detector)
        assert current[0] >= previous[0]
        assert current[1] >= previous[1]
        previous = current


def test_mask_quality_examples():
    """Testing IoU, precision and recall of simple masks"""
    gt = np.zeros((8, 8), dtype=bool)
    gt[0:4, 0:4] = True
    assert mask_quality(gt, gt).as_tuple() == (100.0, 100.0, 100.0)
    doubled = np.zeros((8, 8), dtype=bool)
    doubled[0:4, 0:8] = True
    assert mask_quality(doubled, gt).as_tuple() == (50.0, 50.0, 100.0)
    empty = np.zeros((8, 8), dtype=bool)
    assert mask_quality(empty, gt).as_tuple() == (0.0, None, 0.0)
    assert mask_quality(gt, empty).as_tuple() == (0.0, 0.0, None)
    assert mask_quality(empty, empty).as_tuple() == (None, None, None)
    soft = np.where(gt, 0.5, 0.49)
    assert mask_quality(soft, gt).as_tuple() == (100.0, 100.0, 100.0)
    with pytest.raises(ShapeMismatchError):
        mask_quality(gt, gt[:4])


def test_mask_quality_against_loops():
    """Testing mask scores against pixel counting"""
    rng = np.random.default_rng(5)
    for _ in range(20):
        pred = rng.uniform(size=(8, 8))
        gt = rng.uniform(size=(8, 8)) < 0.4
        both = either = predicted = 0
        for i in range(8):
            for j in range(8):
                p = pred[i, j] >= 0.5
                both += int(p and gt[i, j])
                either += int(p or gt[i, j])
                predicted += int(p)
        scores = mask_quality(pred, gt)
        assert scores.iou == pytest.approx(100.0 * both / either)
        assert scores.precision == pytest.approx(100.0 * both / predicted)
        assert scores.recall == pytest.approx(100.0 * both / gt.sum())


def test_mean_mask_quality_skips_undefined():
    """Testing the set average of mask scores"""
    mean = mean_mask_quality([MaskScores(50.0, None, 100.0), MaskScores(30.0, 20.0, None)])
    assert mean.as_tuple() == (40.0, 20.0, 100.0)
    assert mean_mask_quality([]).as_tuple() == (None, None, None)


if __name__ == '__main__':
    pytest.main(sys.argv)
