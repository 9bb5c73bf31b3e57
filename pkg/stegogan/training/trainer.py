"""Alternating generator and discriminator optimisation of StegoGAN."""
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
import logging
import os
from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)
import numpy as np
import torch
from torch import nn
from tqdm import tqdm
from stegogan.cycle.stego_cycle import attach_identity, run_cycles
from stegogan.domain.domain_model import DomainTag, TranslationBundle
from stegogan.domain.image_io import load_batch
from stegogan.domain.manifest import DatasetManifest, Split
from stegogan.errors import ManifestError, NonFiniteLossError
from stegogan.networks.networks import StegoNetworks, build_networks, discriminate
from stegogan.objectives.objectives import (
    DiscriminatorScores,
    LossReport,
    discriminator_loss,
    total_generator_loss,
)
from stegogan.training.checkpoint import (
    LATEST_CHECKPOINT,
    NUMBERED_CHECKPOINT,
    check_compatible,
    load_checkpoint,
    save_checkpoint,
)
from stegogan.training.image_pool import ImagePool
from stegogan.training.train_config import TrainConfig

logger = logging.getLogger(__name__)

LOSS_LOG = 'loss_log.txt'
NAN_DUMP = 'nan_dump.pt'


@dataclasses.dataclass(frozen=True)
class TrainResult:
    """Outcome of a training run."""

    checkpoint_path: str
    loss_log_path: str
    iterations: int
    last_losses: Optional[Dict[str, float]] = None


def set_requires_grad(modules: Sequence[nn.Module], requires_grad: bool) -> None:
    """Switch gradient tracking of all parameters of some modules

    Args:
        modules: The modules
        requires_grad: New flag
    """
    for module in modules:
        for parameter in module.parameters():
            parameter.requires_grad_(requires_grad)


def configure_determinism(enabled: bool) -> None:
    """Enable or disable deterministic kernels globally

    Args:
        enabled: Whether kernels must be deterministic
    """
    if enabled:
        os.environ.setdefault('CUBLAS_WORKSPACE_CONFIG', ':4096:8')
    torch.use_deterministic_algorithms(enabled, warn_only=True)
    torch.backends.cudnn.deterministic = enabled
    torch.backends.cudnn.benchmark = False


def linear_decay_factor(epochs: int) -> Callable[[int], float]:
    """Learning rate factor of the linear_decay schedule

    The rate is constant for the first half of the epochs and decays linearly towards zero
    over the second half.

    Args:
        epochs: Total number of epochs

    Returns:
        Callable[[int], float]: factor as a function of the completed epochs
    """
    constant = epochs // 2
    decaying = epochs - constant

    def factor(epoch: int) -> float:
        return 1.0 - max(0, epoch - constant) / float(decaying + 1)
    return factor


class StegoTrainer:
    """Trainer owning networks, optimisers, replay buffers and random state of one run

    Iterations sample an unpaired batch from each domain, run the backward then the forward
    cycle, update both generators and M on the generator objective, and finally update D_X on
    pooled x_gen and D_Y on pooled y_gen (plus y_gen_clean when adv_on_clean).

    Args:
        manifest: Training manifest
        config: Training configuration
        out_dir: Directory receiving checkpoints and the loss log
    """

    def __init__(self,
                 manifest: DatasetManifest,
                 config: TrainConfig,
                 out_dir: str) -> None:
        if manifest.split is not Split.TRAIN:
            raise ManifestError('Training needs a train manifest, got {}'.format(
                manifest.split.value))
        if not manifest.source_ids or not manifest.target_ids:
            raise ManifestError('Training needs images in both domains')
        self.manifest = manifest
        self.config = config
        self.out_dir = os.path.abspath(os.path.expanduser(out_dir))
        self.hp = config.effective_hp()
        self.device = torch.device(config.device)
        configure_determinism(config.deterministic)

        self.nets: StegoNetworks = build_networks(config.hp, seed=config.seed).to(self.device)
        self.optimizer_g = torch.optim.Adam(self.nets.generator_parameters(),
                                            lr=self.hp.learning_rate,
                                            betas=(self.hp.beta1, self.hp.beta2))
        self.optimizer_d = torch.optim.Adam(self.nets.discriminator_parameters(),
                                            lr=self.hp.learning_rate,
                                            betas=(self.hp.beta1, self.hp.beta2))
        if config.lr_schedule == 'linear_decay':
            factor = linear_decay_factor(self.hp.epochs)
        else:
            factor = _constant_factor
        self.scheduler_g = torch.optim.lr_scheduler.LambdaLR(self.optimizer_g, factor)
        self.scheduler_d = torch.optim.lr_scheduler.LambdaLR(self.optimizer_d, factor)
        self.pool_x = ImagePool(config.pool_size, np.random.default_rng([config.seed, 1]))
        self.pool_y = ImagePool(config.pool_size, np.random.default_rng([config.seed, 2]))
        self.noise_generator = torch.Generator(device=self.device)
        self.noise_generator.manual_seed(config.seed)
        self.iteration = 0

    @property
    def iterations_per_epoch(self) -> int:
        """Number of batches per epoch, driven by the larger domain"""
        largest = max(len(self.manifest.source_ids), len(self.manifest.target_ids))
        return max(1, largest // self.hp.batch_size)

    @property
    def total_iterations(self) -> int:
        """Last global iteration of the run"""
        total = self.iterations_per_epoch * self.hp.epochs
        if self.config.max_iterations is not None:
            total = min(total, self.config.max_iterations)
        return total

    @property
    def loss_log_path(self) -> str:
        """Location of the per-iteration loss log"""
        return os.path.join(self.out_dir, LOSS_LOG)

    def to_config(self) -> Dict[str, Any]:
        """Create a configuration mapping of the run

        Returns:
            Dict[str, Any]
        """
        return {'out_dir': self.out_dir, 'train': self.config.to_config()}

    def epoch_batches(self, epoch: int) -> List[Tuple[List[str], List[str]]]:
        """File paths of every batch of one epoch

        The order of each domain is a permutation seeded by (seed, epoch), so any iteration
        can be reproduced without replaying the earlier ones.

        Args:
            epoch: Zero based epoch index

        Returns:
            List[Tuple[List[str], List[str]]]: (domain X paths, domain Y paths) per batch
        """
        rng = np.random.default_rng([self.config.seed, epoch])
        sources = self.manifest.source_ids
        targets = self.manifest.target_ids
        order_x = rng.permutation(len(sources))
        order_y = rng.permutation(len(targets))
        size = self.hp.batch_size
        batches = list()
        for index in range(self.iterations_per_epoch):
            positions = range(index * size, (index + 1) * size)
            batches.append(
                ([self.manifest.source_path(sources[order_x[p % len(sources)]])
                  for p in positions],
                 [self.manifest.target_path(targets[order_y[p % len(targets)]])
                  for p in positions]))
        return batches

    def _load(self, paths: Sequence[str], channels: int, tag: DomainTag) -> torch.Tensor:
        return load_batch(paths, channels=channels, domain_tag=tag).to(self.device)

    def generator_step(self, x: torch.Tensor, y: torch.Tensor) -> Tuple[TranslationBundle,
                                                                          LossReport]:
        """Update both generators and M with discriminators held fixed

        Args:
            x: Domain X batch
            y: Domain Y batch

        Returns:
            Tuple[TranslationBundle, LossReport]

        Raises:
            NonFiniteLossError: A loss component is not finite, a dump is written first
        """
        discriminators = (self.nets.d_x, self.nets.d_y)
        set_requires_grad(discriminators, False)
        try:
            bundle = run_cycles(x, y, self.nets, self.hp, self.noise_generator,
                                use_mask=self.config.use_mask)
            if self.config.uses_identity():
                bundle = attach_identity(bundle, self.nets)
            clean_scores = None
            if self.config.adv_on_clean and self.config.use_mask:
                clean_scores = discriminate(self.nets.d_y, bundle.y_gen_clean)
            scores = DiscriminatorScores(x_gen=discriminate(self.nets.d_x, bundle.x_gen),
                                         y_gen=discriminate(self.nets.d_y, bundle.y_gen),
                                         y_gen_clean=clean_scores)
            try:
                report = total_generator_loss(bundle, scores, self.hp, self.config.gan_mode,
                                              self.config.identity_weight_absolute)
            except NonFiniteLossError:
                self.dump_bundle(bundle)
                raise
            self.optimizer_g.zero_grad(set_to_none=True)
            report.total_gen.backward()
            self.optimizer_g.step()
        finally:
            set_requires_grad(discriminators, True)
        return bundle, report

    def discriminator_step(self, bundle: TranslationBundle) -> torch.Tensor:
        """Update D_X and D_Y on real images against pooled generated ones

        Args:
            bundle: Bundle of the generator step of the same iteration

        Returns:
            torch.Tensor: detached sum of both discriminator losses

        Raises:
            NonFiniteLossError: A loss is not finite, a dump is written first
        """
        fake_x = self.pool_x.query(bundle.x_gen.detach())
        fake_y = self.pool_y.query(bundle.y_gen.detach())
        if self.config.adv_on_clean and self.config.use_mask:
            fake_y = torch.cat([fake_y, self.pool_y.query(bundle.y_gen_clean.detach())], dim=0)
        try:
            loss = (discriminator_loss(self.nets.d_x, bundle.x, fake_x, self.config.gan_mode)
                    + discriminator_loss(self.nets.d_y, bundle.y, fake_y, self.config.gan_mode))
        except NonFiniteLossError:
            self.dump_bundle(bundle)
            raise
        self.optimizer_d.zero_grad(set_to_none=True)
        loss.backward()
        self.optimizer_d.step()
        return loss.detach()

    def train_step(self, x: torch.Tensor, y: torch.Tensor) -> LossReport:
        """Run one full iteration

        Args:
            x: Domain X batch
            y: Domain Y batch

        Returns:
            LossReport: including total_disc
        """
        bundle, report = self.generator_step(x, y)
        total_disc = self.discriminator_step(bundle)
        self.iteration += 1
        return dataclasses.replace(report, total_disc=total_disc)

    def dump_bundle(self, bundle: TranslationBundle) -> str:
        """Save the tensors of a failing iteration

        Args:
            bundle: The bundle

        Returns:
            str: location of the dump
        """
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, NAN_DUMP)
        tensors = {field.name: getattr(bundle, field.name).detach().cpu()
                   for field in dataclasses.fields(bundle)
                   if getattr(bundle, field.name) is not None}
        torch.save({'iteration': self.iteration, 'bundle': tensors}, path)
        logger.error('Non-finite loss at iteration %d, bundle written to %s',
                     self.iteration + 1, path)
        return path

    def state_dict(self) -> Dict[str, Any]:
        """Full resumable state of the run

        Returns:
            Dict[str, Any]
        """
        return {
            'config': self.config.to_config(),
            'iteration': self.iteration,
            'networks': {name: network.state_dict()
                         for name, network in self.nets.named_networks().items()},
            'optimizers': {'generators': self.optimizer_g.state_dict(),
                           'discriminators': self.optimizer_d.state_dict()},
            'schedulers': {'generators': self.scheduler_g.state_dict(),
                           'discriminators': self.scheduler_d.state_dict()},
            'rng': {'torch': torch.get_rng_state(),
                    'noise': self.noise_generator.get_state()},
            'pools': {'x': self.pool_x.state_dict(), 'y': self.pool_y.state_dict()},
        }

    def load_state_dict(self, archive: Dict[str, Any]) -> None:
        """Restore a state written by :meth:`state_dict`

        Args:
            archive: Checkpoint archive

        Raises:
            ConfigurationError: The checkpoint belongs to an incompatible configuration
        """
        check_compatible(TrainConfig.from_config(archive['config']), self.config)
        for name, network in self.nets.named_networks().items():
            network.load_state_dict(archive['networks'][name])
        self.optimizer_g.load_state_dict(archive['optimizers']['generators'])
        self.optimizer_d.load_state_dict(archive['optimizers']['discriminators'])
        self.scheduler_g.load_state_dict(archive['schedulers']['generators'])
        self.scheduler_d.load_state_dict(archive['schedulers']['discriminators'])
        torch.set_rng_state(archive['rng']['torch'].cpu())
        self.noise_generator.set_state(archive['rng']['noise'].cpu())
        self.pool_x.load_state_dict(archive['pools']['x'], str(self.device))
        self.pool_y.load_state_dict(archive['pools']['y'], str(self.device))
        self.iteration = int(archive['iteration'])

    def save(self, numbered: bool = False) -> str:
        """Write the latest checkpoint, and optionally a numbered copy

        Args:
            numbered: Also keep a checkpoint named after the iteration

        Returns:
            str: path of the latest checkpoint
        """
        state = self.state_dict()
        if numbered:
            save_checkpoint(os.path.join(self.out_dir, NUMBERED_CHECKPOINT.format(
                self.iteration)), state)
        return save_checkpoint(os.path.join(self.out_dir, LATEST_CHECKPOINT), state)

    def _batches_from(self, start: int) -> Iterator[Tuple[int, List[str], List[str]]]:
        per_epoch = self.iterations_per_epoch
        epoch = start // per_epoch
        offset = start % per_epoch
        while epoch * per_epoch + offset < self.total_iterations:
            for index, (x_paths, y_paths) in enumerate(self.epoch_batches(epoch)):
                if index < offset:
                    continue
                if epoch * per_epoch + index >= self.total_iterations:
                    return
                yield epoch, x_paths, y_paths
            epoch += 1
            offset = 0

    def _truncate_loss_log(self) -> None:
        if not os.path.isfile(self.loss_log_path):
            open(self.loss_log_path, 'w').close()
            return
        with open(self.loss_log_path, 'r') as fi:
            kept = [line for line in fi
                    if line.strip() and int(line.split()[0]) <= self.iteration]
        with open(self.loss_log_path, 'w') as fo:
            fo.writelines(kept)

    def run(self, overwrite: bool = False, resume_from: Optional[str] = None) -> TrainResult:
        """Train until the schedule or max_iterations is exhausted

        Args:
            overwrite: Allow writing into a non-empty output directory
            resume_from: Checkpoint to continue from

        Returns:
            TrainResult

        Raises:
            FileExistsError: Output directory not empty, aborting.
                             Use overwrite=True to replace its contents.
        """
        if resume_from is None and os.path.isdir(self.out_dir) and os.listdir(self.out_dir) \
                and overwrite is not True:
            raise FileExistsError(
                'Output directory {} is not empty, aborting. Use overwrite to replace'.format(
                    self.out_dir))
        os.makedirs(self.out_dir, exist_ok=True)
        if resume_from is not None:
            self.load_state_dict(load_checkpoint(resume_from, str(self.device)))
            logger.info('Resuming from %s at iteration %d', resume_from, self.iteration)
            self._truncate_loss_log()
        else:
            open(self.loss_log_path, 'w').close()
        if self.iteration >= self.total_iterations:
            logger.info('Nothing to train: iteration %d of %d', self.iteration,
                        self.total_iterations)
            return TrainResult(self.save(), self.loss_log_path, self.iteration)

        per_epoch = self.iterations_per_epoch
        last: Optional[Dict[str, float]] = None
        self.nets.train()
        with open(self.loss_log_path, 'a') as log_file, \
                tqdm(total=self.total_iterations, initial=self.iteration, disable=None,
                     desc='train') as progress:
            for epoch, x_paths, y_paths in self._batches_from(self.iteration):
                x = self._load(x_paths, self.hp.input_nc, DomainTag.X)
                y = self._load(y_paths, self.hp.output_nc, DomainTag.Y)
                report = self.train_step(x, y)
                log_file.write(report.to_log_line(self.iteration) + '\n')
                log_file.flush()
                last = report.to_floats()
                progress.update(1)
                progress.set_postfix(g='{:.3f}'.format(last['total_gen']),
                                     d='{:.3f}'.format(last['total_disc']))
                if self.iteration % per_epoch == 0:
                    self.scheduler_g.step()
                    self.scheduler_d.step()
                    logger.info('Epoch %d done, total_gen %.4f total_disc %.4f', epoch + 1,
                                last['total_gen'], last['total_disc'])
                    self.save()
                if self.config.checkpoint_every and \
                        self.iteration % self.config.checkpoint_every == 0:
                    self.save(numbered=True)
        return TrainResult(self.save(), self.loss_log_path, self.iteration, last)


def _constant_factor(epoch: int) -> float:
    return 1.0


def train(manifest: DatasetManifest, config: TrainConfig, out_dir: str,
          overwrite: bool = False) -> TrainResult:
    """Train a model from scratch

    A run with zero epochs writes the initial checkpoint and an empty loss log.

    Args:
        manifest: Training manifest
        config: Training configuration
        out_dir: Output directory
        overwrite: Allow a non-empty output directory

    Returns:
        TrainResult
    """
    return StegoTrainer(manifest, config, out_dir).run(overwrite=overwrite)


def resume(checkpoint: str, manifest: DatasetManifest, config: TrainConfig,
           out_dir: Optional[str] = None) -> TrainResult:
    """Continue a run from a checkpoint

    Args:
        checkpoint: Checkpoint file
        manifest: Training manifest
        config: Configuration, structurally equal to the checkpoint's
        out_dir: Output directory, the checkpoint's directory when None

    Returns:
        TrainResult

    Raises:
        SchemaMismatchError: Checkpoint schema differs
        ConfigurationError: Incompatible configuration
    """
    if out_dir is None:
        out_dir = os.path.dirname(os.path.abspath(checkpoint))
    return StegoTrainer(manifest, config, out_dir).run(resume_from=checkpoint)
