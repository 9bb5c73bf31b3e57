"""Loss terms and the composed generator and discriminator objectives."""
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
import math
from typing import (
    Dict,
    Optional,
)
import torch
import torch.nn.functional as F
from stegogan.cycle.stego_cycle import consistency_mask
from stegogan.domain.domain_model import Hyperparameters, TranslationBundle
from stegogan.errors import ConfigurationError, NonFiniteLossError, ShapeMismatchError
from stegogan.networks.networks import PatchDiscriminator, discriminate

GAN_MODES = ('lsgan', 'vanilla')
ROLES = ('generator', 'discriminator')
LOG_COLUMNS = ('iter', 'gan', 'cyc', 'id', 'reg', 'match', 'total_gen', 'total_disc')


def _check_gan_mode(gan_mode: str) -> None:
    if gan_mode not in GAN_MODES:
        raise ConfigurationError('gan_mode must be one of {}, got {}'.format(GAN_MODES, gan_mode))


def _check_same_shape(first: torch.Tensor, second: torch.Tensor, what: str) -> None:
    if first.shape != second.shape:
        raise ShapeMismatchError('{}: shapes {} and {} differ'.format(
            what, tuple(first.shape), tuple(second.shape)))


def adversarial_loss(d_real: Optional[torch.Tensor], d_fake: torch.Tensor, role: str,
                     gan_mode: str = 'lsgan') -> torch.Tensor:
    """Adversarial loss of either player

    Least squares: the discriminator minimises 0.5 mean((d_real - 1)^2) + 0.5 mean(d_fake^2),
    the generator mean((d_fake - 1)^2). The vanilla mode uses binary cross entropy on logits.

    Args:
        d_real: Scores of real images, ignored for the generator role
        d_fake: Scores of generated images
        role: 'generator' or 'discriminator'
        gan_mode: 'lsgan' or 'vanilla'

    Returns:
        torch.Tensor: scalar loss
    """
    _check_gan_mode(gan_mode)
    if role not in ROLES:
        raise ValueError('role must be one of {}, got {}'.format(ROLES, role))
    if gan_mode == 'lsgan':
        if role == 'generator':
            return ((d_fake - 1.0) ** 2).mean()
        if d_real is None:
            raise ValueError('The discriminator loss needs scores of real images')
        return 0.5 * ((d_real - 1.0) ** 2).mean() + 0.5 * (d_fake ** 2).mean()
    if role == 'generator':
        return F.binary_cross_entropy_with_logits(d_fake, torch.ones_like(d_fake))
    if d_real is None:
        raise ValueError('The discriminator loss needs scores of real images')
    return 0.5 * (F.binary_cross_entropy_with_logits(d_real, torch.ones_like(d_real))
                  + F.binary_cross_entropy_with_logits(d_fake, torch.zeros_like(d_fake)))


def cycle_loss(x: torch.Tensor, x_rec: torch.Tensor,
               y: torch.Tensor, y_rec: torch.Tensor) -> torch.Tensor:
    """Mean absolute back-translation error of both cycles

    Args:
        x: Domain X images
        x_rec: Their reconstruction
        y: Domain Y images
        y_rec: Their reconstruction

    Returns:
        torch.Tensor: mean |x_rec - x| + mean |y_rec - y|
    """
    _check_same_shape(x, x_rec, 'cycle loss')
    _check_same_shape(y, y_rec, 'cycle loss')
    return (x_rec - x).abs().mean() + (y_rec - y).abs().mean()


def identity_loss(x: torch.Tensor, G_YtoX_of_x: torch.Tensor,
                  y: torch.Tensor, G_XtoY_of_y: torch.Tensor) -> torch.Tensor:
    """Mean absolute deviation of both generators from identity

    Args:
        x: Domain X images
        G_YtoX_of_x: G_YtoX applied to x
        y: Domain Y images
        G_XtoY_of_y: G_XtoY applied to y

    Returns:
        torch.Tensor: scalar loss
    """
    _check_same_shape(x, G_YtoX_of_x, 'identity loss')
    _check_same_shape(y, G_XtoY_of_y, 'identity loss')
    return (G_YtoX_of_x - x).abs().mean() + (G_XtoY_of_y - y).abs().mean()


def _mean_sqrt(m: torch.Tensor) -> torch.Tensor:
    # sqrt is only evaluated on positive entries so the gradient stays finite at zero
    positive = m > 0
    safe = torch.where(positive, m, torch.ones_like(m))
    return torch.where(positive, safe.sqrt(), torch.zeros_like(m)).mean()


def mask_regularization(m_gen: torch.Tensor, m_rec: torch.Tensor) -> torch.Tensor:
    """L0.5 sparsity penalty, mean of sqrt(m) per mask summed over both masks

    Args:
        m_gen: Mask of the backward cycle
        m_rec: Mask of the forward cycle

    Returns:
        torch.Tensor: scalar loss

    Raises:
        ValueError: Negative mask values
    """
    if bool((m_gen < 0).any()) or bool((m_rec < 0).any()):
        raise ValueError('Unmatchability masks must be non-negative')
    return _mean_sqrt(m_gen) + _mean_sqrt(m_rec)


def matchable_consistency_loss(bundle: TranslationBundle) -> torch.Tensor:
    """Masked L1 between full and clean outputs outside unmatchable regions

    I(m_gen) weights |y_gen - y_gen_clean| and I(m_rec) weights |y_rec - y_rec_clean|;
    consistency masks broadcast over colour channels.

    Args:
        bundle: Complete translation bundle

    Returns:
        torch.Tensor: scalar loss

    Raises:
        ValueError: Missing bundle fields
    """
    names = ('y_gen', 'y_gen_clean', 'y_rec', 'y_rec_clean', 'm_gen', 'm_rec')
    missing = [name for name in names if getattr(bundle, name) is None]
    if missing:
        raise ValueError('Bundle misses {}'.format(', '.join(missing)))
    _check_same_shape(bundle.y_gen, bundle.y_gen_clean, 'matchable consistency')
    _check_same_shape(bundle.y_rec, bundle.y_rec_clean, 'matchable consistency')
    weight_gen = consistency_mask(bundle.m_gen, tuple(bundle.y_gen.shape[-2:]))
    weight_rec = consistency_mask(bundle.m_rec, tuple(bundle.y_rec.shape[-2:]))
    term_gen = (weight_gen * (bundle.y_gen - bundle.y_gen_clean).abs()).mean()
    term_rec = (weight_rec * (bundle.y_rec - bundle.y_rec_clean).abs()).mean()
    return term_gen + term_rec


@dataclasses.dataclass(frozen=True)
class DiscriminatorScores:
    """Discriminator outputs on generated images, discriminators held fixed."""

    x_gen: torch.Tensor
    y_gen: torch.Tensor
    y_gen_clean: Optional[torch.Tensor] = None


@dataclasses.dataclass(frozen=True)
class LossReport:
    """Loss components of one iteration as scalar tensors."""

    gan: torch.Tensor
    cyc: torch.Tensor
    id: torch.Tensor
    reg: torch.Tensor
    match: torch.Tensor
    total_gen: torch.Tensor
    total_disc: torch.Tensor

    def to_floats(self) -> Dict[str, float]:
        """Return every component as a Python float

        Returns:
            Dict[str, float]
        """
        return {field.name: float(getattr(self, field.name).detach())
                for field in dataclasses.fields(self)}

    def to_log_line(self, iteration: int) -> str:
        """Format one line of the loss log

        Args:
            iteration: Global iteration counter

        Returns:
            str: ``iter gan cyc id reg match total_gen total_disc`` without newline
        """
        values = self.to_floats()
        return ' '.join([str(iteration)] + ['{:.10e}'.format(values[name])
                                            for name in LOG_COLUMNS[1:]])


def identity_weight(hp: Hyperparameters, absolute: bool = False) -> float:
    """Effective weight of the identity loss

    Args:
        hp: Hyperparameters
        absolute: Use lambda_id as is instead of lambda_id * lambda_cyc

    Returns:
        float
    """
    return hp.lambda_id if absolute else hp.lambda_id * hp.lambda_cyc


def check_finite(name: str, value: torch.Tensor) -> None:
    """Raise if a scalar loss is NaN or infinite

    Args:
        name: Component name used in the error
        value: Scalar tensor

    Raises:
        NonFiniteLossError: value is not finite
    """
    number = float(value.detach())
    if not math.isfinite(number):
        raise NonFiniteLossError(name, number)


def total_generator_loss(bundle: TranslationBundle, d_scores: DiscriminatorScores,
                         hp: Hyperparameters, gan_mode: str = 'lsgan',
                         identity_absolute: bool = False) -> LossReport:
    """Compose the generator objective

    total_gen = gan + lambda_cyc cyc + w_id id + lambda_reg reg + lambda_match match with
    w_id = lambda_id * lambda_cyc (or lambda_id when identity_absolute). The identity term is
    zero unless the bundle carries identity translations. When scores of y_gen_clean are given
    the two D_Y terms are averaged.

    Args:
        bundle: Complete translation bundle
        d_scores: Discriminator scores of the generated images
        hp: Hyperparameters
        gan_mode: 'lsgan' or 'vanilla'
        identity_absolute: Apply lambda_id as an absolute weight

    Returns:
        LossReport: total_disc is zero and filled in by the discriminator step

    Raises:
        NonFiniteLossError: A component is NaN or infinite
    """
    gan_x = adversarial_loss(None, d_scores.x_gen, 'generator', gan_mode)
    gan_y = adversarial_loss(None, d_scores.y_gen, 'generator', gan_mode)
    if d_scores.y_gen_clean is not None:
        gan_y = 0.5 * (gan_y + adversarial_loss(None, d_scores.y_gen_clean, 'generator',
                                                gan_mode))
    gan = gan_x + gan_y
    cyc = cycle_loss(bundle.x, bundle.x_rec, bundle.y, bundle.y_rec)
    if bundle.x_idt is not None and bundle.y_idt is not None:
        idt = identity_loss(bundle.x, bundle.x_idt, bundle.y, bundle.y_idt)
    else:
        idt = torch.zeros_like(cyc)
    reg = mask_regularization(bundle.m_gen, bundle.m_rec)
    match = matchable_consistency_loss(bundle)
    components = {'gan': gan, 'cyc': cyc, 'id': idt, 'reg': reg, 'match': match}
    for name, value in components.items():
        check_finite(name, value)
    total = (gan + hp.lambda_cyc * cyc + identity_weight(hp, identity_absolute) * idt
             + hp.lambda_reg * reg + hp.lambda_match * match)
    check_finite('total_gen', total)
    return LossReport(gan=gan, cyc=cyc, id=idt, reg=reg, match=match, total_gen=total,
                      total_disc=torch.zeros_like(total))


def discriminator_loss(d: PatchDiscriminator, real_batch: torch.Tensor,
                       fake_batch: torch.Tensor, gan_mode: str = 'lsgan') -> torch.Tensor:
    """Discriminator objective on real images against generated ones

    Generated images are detached so no gradient reaches the generators.

    Args:
        d: The discriminator
        real_batch: Real images
        fake_batch: Generated images, typically drawn from a replay buffer
        gan_mode: 'lsgan' or 'vanilla'

    Returns:
        torch.Tensor: scalar loss
    """
    d_real = discriminate(d, real_batch)
    d_fake = discriminate(d, fake_batch.detach())
    loss = adversarial_loss(d_real, d_fake, 'discriminator', gan_mode)
    check_finite('total_disc', loss)
    return loss
