"""Desk scale hallucination benchmark, run when STEGO_RUN_BENCHMARK is set"""
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
import os
import numpy as np
import torch
from stegogan.cycle import backward_cycle, perturb, translate
from stegogan.data import SyntheticWorldConfig, build_synthetic, detect_glyph_pixels
from stegogan.domain import DomainTag, batch_to_uint8, load_batch, read_image, read_mask
from stegogan.evaluation import (
    false_positive_rates,
    fid_kid,
    mask_quality,
    mean_mask_quality,
    predict_footprints,
    steganography_probe,
)
from stegogan.training import LATEST_CHECKPOINT, TrainConfig, load_networks, train

pytestmark = pytest.mark.skipif(not os.environ.get('STEGO_RUN_BENCHMARK'),
                                reason='set STEGO_RUN_BENCHMARK to run the desk benchmark')

EPOCHS = 60


@pytest.fixture(scope='module')
def world(tmp_path_factory):
    cfg = SyntheticWorldConfig(resolution=64, n_train_per_domain=300, n_test_pairs=50,
                               unmatchable_ratio=0.4)
    return build_synthetic(cfg, str(tmp_path_factory.mktemp('desk_world')))


@pytest.fixture(scope='module')
def models(world, tmp_path_factory):
    device = 'cuda' if torch.cuda.is_available() else 'cpu'
    runs = {
        'stegogan': {'model': 'stegogan'},
        'cyclegan': {'model': 'cyclegan'},
        'no_reg': {'model': 'stegogan', 'lambda_reg': 0.0},
    }
    trained, configs = dict(), dict()
    for name, overrides in runs.items():
        config = TrainConfig.from_config(dict(overrides, epochs=EPOCHS, batch_size=1,
                                              device=device, seed=0))
        out = str(tmp_path_factory.mktemp(name))
        train(world.train_manifest, config, out)
        trained[name], configs[name] = load_networks(os.path.join(out, LATEST_CHECKPOINT),
                                                     device)
    return trained, configs, device


def translations(nets, world, device):
    manifest = world.test_manifest
    generated = list()
    for source, _ in manifest.pairs:
        x = load_batch([manifest.source_path(source)], domain_tag=DomainTag.X).to(device)
        generated.extend(batch_to_uint8(translate(x, nets)))
    return generated


def test_stegogan_does_not_hallucinate_glyphs(world, models):
    """Testing glyph false positives of StegoGAN against the CycleGAN baseline"""
    trained, _, device = models
    stego_pfpr, stego_ifpr = false_positive_rates(
        translations(trained['stegogan'], world, device), detect_glyph_pixels)
    baseline_pfpr, _ = false_positive_rates(
        translations(trained['cyclegan'], world, device), detect_glyph_pixels)
    assert baseline_pfpr > 1.0
    assert stego_pfpr < 0.2
    assert stego_ifpr < 2.0


def test_mask_localises_glyphs(world, models):
    """Testing that the binarised footprint overlaps the glyph masks"""
    trained, _, device = models
    manifest = world.train_manifest
    masks = manifest.mask_paths()
    scores = list()
    for target in world.glyph_targets:
        y = load_batch([manifest.target_path(target)], domain_tag=DomainTag.Y).to(device)
        footprint = predict_footprints(trained['stegogan'], y)[0].cpu().numpy()
        scores.append(mask_quality(footprint, read_mask(masks[target])))
    assert mean_mask_quality(scores).iou > 20.0


def test_mask_regularisation_matters(world, models):
    """Testing that dropping the sparsity penalty degrades FID and pFPR"""
    trained, _, device = models
    manifest = world.test_manifest
    real = [read_image(manifest.target_path(target)) for _, target in manifest.pairs]
    with_reg = translations(trained['stegogan'], world, device)
    without_reg = translations(trained['no_reg'], world, device)
    assert fid_kid(real, without_reg).fid >= 2.0 * fid_kid(real, with_reg).fid
    assert false_positive_rates(without_reg, detect_glyph_pixels)[0] > \
        false_positive_rates(with_reg, detect_glyph_pixels)[0]


def glyph_samples(world, device, limit: int = 32):
    manifest = world.train_manifest
    masks = manifest.mask_paths()
    targets = list(world.glyph_targets[:limit])
    y = load_batch([manifest.target_path(target) for target in targets],
                   domain_tag=DomainTag.Y).to(device)
    gt = torch.as_tensor(np.stack([read_mask(masks[target]) for target in targets]))
    return y, gt.to(device)


def test_noise_breaks_baseline_steganography_only(world, models):
    """Testing that slight noise on x_gen ruins the baseline reconstruction of glyphs"""
    trained, configs, device = models
    y, gt = glyph_samples(world, device)
    baseline = steganography_probe(trained['cyclegan'], y, gt, [0.0, 0.01],
                                   configs['cyclegan'].effective_hp(), use_mask=False)
    stego = steganography_probe(trained['stegogan'], y, gt, [0.0, 0.01],
                                configs['stegogan'].effective_hp(), use_mask=True)
    assert baseline.rows[1].unmatchable > 1.5 * baseline.rows[0].unmatchable
    assert abs(stego.rows[1].unmatchable - stego.rows[0].unmatchable) \
        < 0.1 * stego.rows[0].unmatchable


def test_injected_features_carry_unmatchable_content(world, models):
    """Testing that zeroing z_gen_unmatch worsens the reconstruction of glyph pixels"""
    trained, configs, device = models
    nets, hp = trained['stegogan'], configs['stegogan'].effective_hp()
    y, gt = glyph_samples(world, device)
    region = gt.to(y.dtype)
    nets.eval()
    with torch.no_grad():
        result = backward_cycle(y, nets, hp, torch.Generator(device=device).manual_seed(0))
        noisy = perturb(result.x_gen, hp.epsilon_amplitude,
                        torch.Generator(device=device).manual_seed(0))
        without = nets.g_xy.decode(nets.g_xy.encode(noisy))

    def glyph_error(y_rec):
        error = (y_rec - y).abs().mean(dim=1)
        return float((error * region).sum() / region.sum())

    assert hp.epsilon_amplitude > 0
    assert glyph_error(without) > glyph_error(result.y_rec)


if __name__ == '__main__':
    pytest.main(sys.argv)
