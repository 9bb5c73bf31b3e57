"""Command line interface of stegogan."""
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
import argparse
import logging
import os
import sys
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
)
import numpy as np
import torch
from stegogan.__version__ import __version__
from stegogan.config import dump_config_file, load_config_file
from stegogan.cycle.stego_cycle import translate
from stegogan.data.protocols import (
    build_mri_dataset,
    build_paired_manifest,
    build_ratio_dataset,
    build_toponym_masks,
)
from stegogan.data.synthetic import SyntheticWorldConfig, build_synthetic
from stegogan.domain.domain_model import DATASET_PRESETS, DomainTag
from stegogan.domain.image_io import batch_to_uint8, list_images, load_batch, read_mask, \
    write_image
from stegogan.domain.manifest import DatasetManifest
from stegogan.errors import ManifestError, StegoGanError
from stegogan.evaluation.feature_distance import inception_extractor
from stegogan.evaluation.masks import export_masks
from stegogan.evaluation.probe import steganography_probe
from stegogan.evaluation.report import DETECTORS, METRICS, evaluate_directories, write_report
from stegogan.training.checkpoint import load_networks
from stegogan.training.train_config import MODELS, TrainConfig
from stegogan.training.trainer import resume, train

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
RUN_RECORD = 'run.yaml'
SEED_VARIABLE = 'STEGO_SEED'
DEFAULT_AMPLITUDES = (0.0, 0.005, 0.01, 0.02, 0.05)


class UsageError(Exception):
    """Invalid command line usage detected after parsing."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def resolve_seed(flag: Optional[int], config: Optional[Mapping[str, Any]] = None) -> int:
    """Pick the seed of a run: flag, then config file, then STEGO_SEED, then 0

    Args:
        flag: Value of --seed
        config: Parsed config file

    Returns:
        int

    Raises:
        UsageError: STEGO_SEED is not an integer
    """
    if flag is not None:
        return flag
    if config and config.get('seed') is not None:
        return int(config['seed'])
    value = os.environ.get(SEED_VARIABLE)
    if value:
        try:
            return int(value)
        except ValueError:
            raise UsageError('{} must be an integer, got {!r}'.format(SEED_VARIABLE, value))
    return 0


def write_run_record(out_dir: str, subcommand: str, config: Mapping[str, Any],
                     seed: Optional[int], argv: Sequence[str],
                     exit_code: Optional[int] = None) -> str:
    """Write the structured record of a run

    Args:
        out_dir: Output directory of the run
        subcommand: Executed subcommand
        config: Effective configuration
        seed: Seed of the run
        argv: Command line arguments
        exit_code: Exit status of the run

    Returns:
        str: path of the record
    """
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, RUN_RECORD)
    dump_config_file({'subcommand': subcommand, 'config': dict(config), 'seed': seed,
                      'exit_code': exit_code, 'version': __version__,
                      'torch_version': str(torch.__version__), 'argv': list(argv)}, path)
    return path


def _note(args: argparse.Namespace, config: Mapping[str, Any],
          seed: Optional[int] = None) -> None:
    args.record_config = dict(config)
    args.record_seed = seed


def _record_dir(args: argparse.Namespace) -> Optional[str]:
    if getattr(args, 'out', None):
        return args.out
    if getattr(args, 'report', None):
        return os.path.dirname(os.path.abspath(args.report))
    return None


def _finish_record(args: argparse.Namespace, argv: Sequence[str], exit_code: int) -> None:
    out_dir = _record_dir(args)
    if out_dir is None:
        return
    subcommand = ' '.join(part for part in (args.command, getattr(args, 'kind', None)) if part)
    try:
        write_run_record(out_dir, subcommand, args.record_config, args.record_seed, argv,
                         exit_code)
    except OSError as error:
        logger.error('Cannot write the run record: %s', error)


def _float_list(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(',') if value]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma separated numbers, got {}'.format(text))


def _metric_list(text: str) -> List[str]:
    metrics = [value.strip() for value in text.split(',') if value.strip()]
    unknown = [metric for metric in metrics if metric not in METRICS]
    if unknown:
        raise argparse.ArgumentTypeError('unknown metrics {}, choose from {}'.format(
            ', '.join(unknown), ', '.join(METRICS)))
    return metrics


def _synthetic(args: argparse.Namespace) -> int:
    config: Dict[str, Any] = load_config_file(args.config) if args.config else dict()
    flags = {'resolution': args.resolution, 'n_train_per_domain': args.n_train,
             'n_test_pairs': args.n_test, 'unmatchable_ratio': args.ratio,
             'glyph_density': args.glyph_density}
    config.update({key: value for key, value in flags.items() if value is not None})
    config['seed'] = resolve_seed(args.seed, config)
    _note(args, config, config['seed'])
    cfg = SyntheticWorldConfig.from_config(config)
    _note(args, cfg.to_config(), cfg.seed)
    dataset = build_synthetic(cfg, args.out, overwrite=args.overwrite)
    print(dataset.train_manifest_path)
    return EXIT_OK


def _ratio(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    _note(args, {'source': args.source, 'target': args.target, 'ratio': args.ratio,
                 'total': args.total, 'n_sources': args.n_sources,
                 'detector': args.detector}, seed)
    detector = DETECTORS[args.detector]
    manifest = build_ratio_dataset(args.source, args.target, args.ratio, args.total, seed,
                                   n_sources=args.n_sources, detector=detector)
    path = os.path.join(args.out, 'train_manifest.txt')
    manifest.write(path)
    if args.test_source and args.test_target:
        build_paired_manifest(args.test_source, args.test_target, detector).write(
            os.path.join(args.out, 'test_manifest.txt'))
    print(path)
    return EXIT_OK


def _toponym_mask(args: argparse.Namespace) -> int:
    _note(args, {'with_text': args.with_text, 'without_text': args.without_text,
                 'radius': args.radius})
    written = build_toponym_masks(args.with_text, args.without_text, args.out, args.radius)
    args.record_config['masks'] = len(written)
    return EXIT_OK


def _mri_label(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    _note(args, {'t1': args.t1, 'flair': args.flair, 'masks': args.masks,
                 'ratio': args.ratio, 'n_source': args.n_source,
                 'n_target': args.n_target, 'n_test': args.n_test}, seed)
    train_manifest, test_manifest = build_mri_dataset(
        args.t1, args.flair, args.masks, ratio=args.ratio, n_source=args.n_source,
        n_target=args.n_target, n_test=args.n_test, seed=seed)
    train_manifest.write(os.path.join(args.out, 'train_manifest.txt'))
    test_manifest.write(os.path.join(args.out, 'test_manifest.txt'))
    return EXIT_OK


def train_config_from_args(args: argparse.Namespace) -> TrainConfig:
    """Merge preset, config file and flags into a training configuration

    Args:
        args: Parsed train arguments

    Returns:
        TrainConfig
    """
    file_config: Dict[str, Any] = load_config_file(args.config) if args.config else dict()
    merged: Dict[str, Any] = dict()
    if args.preset:
        merged['hp'] = dict(DATASET_PRESETS[args.preset])
    for key, value in file_config.items():
        if key == 'hp':
            merged.setdefault('hp', dict()).update(value or dict())
        else:
            merged[key] = value
    flags = {'epochs': args.epochs, 'device': args.device, 'model': args.model,
             'max_iterations': args.max_iterations}
    merged.update({key: value for key, value in flags.items() if value is not None})
    if args.deterministic:
        merged['deterministic'] = True
    merged['seed'] = resolve_seed(args.seed, file_config)
    return TrainConfig.from_config(merged)


def _train(args: argparse.Namespace) -> int:
    cfg = train_config_from_args(args)
    _note(args, cfg.to_config(), cfg.seed)
    manifest = DatasetManifest.read(args.data)
    if args.resume:
        result = resume(args.resume, manifest, cfg, out_dir=args.out)
    else:
        result = train(manifest, cfg, args.out, overwrite=args.overwrite)
    logger.info('Finished after %d iterations, checkpoint %s', result.iterations,
                result.checkpoint_path)
    print(result.checkpoint_path)
    return EXIT_OK


def _translate(args: argparse.Namespace) -> int:
    _note(args, {'ckpt': args.ckpt, 'input': args.input})
    nets, cfg = load_networks(args.ckpt, args.device)
    args.record_seed = cfg.seed
    names = list_images(args.input)
    os.makedirs(args.out, exist_ok=True)
    for name in names:
        x = load_batch([os.path.join(args.input, name)], channels=cfg.hp.input_nc,
                       domain_tag=DomainTag.X).to(args.device)
        write_image(os.path.join(args.out, name), batch_to_uint8(translate(x, nets))[0])
    logger.info('Translated %d images into %s', len(names), args.out)
    args.record_config['images'] = len(names)
    return EXIT_OK


def _evaluate(args: argparse.Namespace) -> int:
    _note(args, {'pred': args.pred, 'target': args.target, 'metrics': list(args.metrics),
                 'sigma': list(args.sigma), 'detector': args.detector,
                 'extractor': args.extractor})
    extractor = inception_extractor(args.device) if args.extractor == 'inception' else None
    values = evaluate_directories(args.pred, args.target, args.metrics,
                                  sigmas=(args.sigma[0], args.sigma[1]),
                                  detector=args.detector, min_instance_px=args.min_instance_px,
                                  pred_mask_dir=args.pred_masks, gt_mask_dir=args.gt_masks,
                                  feature_extractor=extractor, channels=args.channels)
    write_report(values, args.report)
    return EXIT_OK


def _probe(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    _note(args, {'ckpt': args.ckpt, 'data': args.data, 'amplitudes': list(args.amplitudes)},
          seed)
    nets, cfg = load_networks(args.ckpt, args.device)
    manifest = DatasetManifest.read(args.data)
    masks = manifest.mask_paths()
    ids = [target_id for target_id in manifest.target_ids if masks.get(target_id)]
    if args.limit is not None:
        ids = ids[:args.limit]
    if not ids:
        raise ManifestError('The manifest lists no target image with a ground-truth mask')
    args.record_config['images'] = len(ids)
    y = load_batch([manifest.target_path(target_id) for target_id in ids],
                   channels=cfg.hp.output_nc, domain_tag=DomainTag.Y).to(args.device)
    gt = torch.as_tensor(np.stack([read_mask(masks[target_id]) for target_id in ids]))
    table = steganography_probe(nets, y, gt, args.amplitudes, hp=cfg.effective_hp(),
                                use_mask=cfg.use_mask, seed=seed)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, 'probe.txt'), 'w') as fo:
        fo.writelines(line + '\n' for line in table.to_lines())
    return EXIT_OK


def _export_masks(args: argparse.Namespace) -> int:
    _note(args, {'ckpt': args.ckpt, 'input': args.input, 'x_input': args.x_input})
    nets, cfg = load_networks(args.ckpt, args.device)
    args.record_seed = cfg.seed
    paths = [os.path.join(args.input, name) for name in list_images(args.input)]
    x_paths = None
    if args.x_input:
        x_paths = [os.path.join(args.x_input, name) for name in list_images(args.x_input)]
    export_masks(nets, paths, args.out, channels=cfg.hp.output_nc, device=args.device,
                 use_mask=cfg.use_mask, x_paths=x_paths, x_channels=cfg.hp.input_nc)
    args.record_config['images'] = len(paths)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser of all subcommands

    Returns:
        argparse.ArgumentParser
    """
    parser = _ArgumentParser(prog='stegogan',
                             description='Non-bijective unpaired image translation')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    build = commands.add_parser('build-dataset', help='Build a dataset and its manifests')
    kinds = build.add_subparsers(dest='kind', metavar='kind')
    kinds.required = True

    synthetic = kinds.add_parser('synthetic', help='Synthetic world with unmatchable glyphs')
    synthetic.add_argument('--out', required=True)
    synthetic.add_argument('--config', help='YAML file of SyntheticWorldConfig fields')
    synthetic.add_argument('--resolution', type=int)
    synthetic.add_argument('--n-train', type=int)
    synthetic.add_argument('--n-test', type=int)
    synthetic.add_argument('--ratio', type=float)
    synthetic.add_argument('--glyph-density', type=int)
    synthetic.add_argument('--seed', type=int)
    synthetic.add_argument('--overwrite', action='store_true')
    synthetic.set_defaults(handler=_synthetic)

    ratio = kinds.add_parser('ratio', help='Fixed share of unmatchable targets')
    ratio.add_argument('--source', required=True)
    ratio.add_argument('--target', required=True)
    ratio.add_argument('--ratio', type=float, required=True)
    ratio.add_argument('--total', type=int, required=True)
    ratio.add_argument('--n-sources', type=int)
    ratio.add_argument('--detector', choices=sorted(DETECTORS), default='highway')
    ratio.add_argument('--test-source')
    ratio.add_argument('--test-target')
    ratio.add_argument('--seed', type=int)
    ratio.add_argument('--out', required=True)
    ratio.set_defaults(handler=_ratio)

    toponym = kinds.add_parser('toponym-mask', help='Masks from maps with and without labels')
    toponym.add_argument('--with-text', required=True)
    toponym.add_argument('--without-text', required=True)
    toponym.add_argument('--radius', type=int, default=4)
    toponym.add_argument('--out', required=True)
    toponym.set_defaults(handler=_toponym_mask)

    mri = kinds.add_parser('mri-label', help='Healthy/tumorous slice selection')
    mri.add_argument('--t1', required=True)
    mri.add_argument('--flair', required=True)
    mri.add_argument('--masks', required=True)
    mri.add_argument('--ratio', type=float, default=0.6)
    mri.add_argument('--n-source', type=int, default=800)
    mri.add_argument('--n-target', type=int, default=800)
    mri.add_argument('--n-test', type=int, default=335)
    mri.add_argument('--seed', type=int)
    mri.add_argument('--out', required=True)
    mri.set_defaults(handler=_mri_label)

    train_parser = commands.add_parser('train', help='Train a model')
    train_parser.add_argument('--config', help='YAML file of TrainConfig fields')
    train_parser.add_argument('--data', required=True, help='Training manifest')
    train_parser.add_argument('--out', required=True)
    train_parser.add_argument('--resume', help='Checkpoint to continue from')
    train_parser.add_argument('--deterministic', action='store_true')
    train_parser.add_argument('--preset', choices=sorted(DATASET_PRESETS))
    train_parser.add_argument('--model', choices=MODELS)
    train_parser.add_argument('--epochs', type=int)
    train_parser.add_argument('--max-iterations', type=int)
    train_parser.add_argument('--device')
    train_parser.add_argument('--seed', type=int)
    train_parser.add_argument('--overwrite', action='store_true')
    train_parser.set_defaults(handler=_train)

    translate_parser = commands.add_parser('translate', help='Translate domain X images')
    translate_parser.add_argument('--ckpt', required=True)
    translate_parser.add_argument('--in', dest='input', required=True)
    translate_parser.add_argument('--out', required=True)
    translate_parser.add_argument('--device', default='cpu')
    translate_parser.set_defaults(handler=_translate)

    evaluate = commands.add_parser('evaluate', help='Compare predictions with targets')
    evaluate.add_argument('--pred', required=True)
    evaluate.add_argument('--target', required=True)
    evaluate.add_argument('--metrics', type=_metric_list, default=list(METRICS[:3]))
    evaluate.add_argument('--report', required=True)
    evaluate.add_argument('--out')
    evaluate.add_argument('--sigma', type=float, nargs=2, default=[5.0, 10.0])
    evaluate.add_argument('--detector', choices=sorted(DETECTORS), default='highway')
    evaluate.add_argument('--min-instance-px', type=int, default=5)
    evaluate.add_argument('--pred-masks')
    evaluate.add_argument('--gt-masks')
    evaluate.add_argument('--extractor', choices=('random', 'inception'), default='random')
    evaluate.add_argument('--channels', type=int, choices=(1, 3), default=3)
    evaluate.add_argument('--device', default='cpu')
    evaluate.set_defaults(handler=_evaluate)

    probe = commands.add_parser('probe-stego', help='Steganography sensitivity curve')
    probe.add_argument('--ckpt', required=True)
    probe.add_argument('--data', required=True, help='Manifest with ground-truth masks')
    probe.add_argument('--amplitudes', type=_float_list, default=list(DEFAULT_AMPLITUDES))
    probe.add_argument('--limit', type=int, default=32)
    probe.add_argument('--out', required=True)
    probe.add_argument('--device', default='cpu')
    probe.add_argument('--seed', type=int)
    probe.set_defaults(handler=_probe)

    masks = commands.add_parser('export-masks', help='Write masks and translations')
    masks.add_argument('--ckpt', required=True)
    masks.add_argument('--in', dest='input', required=True, help='Domain Y images')
    masks.add_argument('--x-in', dest='x_input', help='Domain X images to translate into y_gen')
    masks.add_argument('--out', required=True)
    masks.add_argument('--device', default='cpu')
    masks.set_defaults(handler=_export_masks)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line

    Once the arguments parse, the run record is written into the output directory whatever
    the outcome.

    Args:
        argv: Arguments without program name, sys.argv[1:] when None

    Returns:
        int: 0 on success, 1 on usage errors, 2 on runtime failures and invalid inputs
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_USAGE if exit_request.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')
    handler: Callable[[argparse.Namespace], int] = args.handler
    _note(args, {key: value for key, value in vars(args).items() if key != 'handler'})
    exit_code = EXIT_FAILURE
    try:
        exit_code = handler(args)
    except UsageError as error:
        logger.error('%s', error)
        exit_code = EXIT_USAGE
    except (StegoGanError, OSError, ValueError) as error:
        logger.error('%s: %s', type(error).__name__, error)
        exit_code = EXIT_FAILURE
    finally:
        _finish_record(args, argv, exit_code)
    return exit_code


def main() -> None:
    """Console script entry point"""
    sys.exit(dispatch())
