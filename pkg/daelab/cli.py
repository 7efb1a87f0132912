"""Command-line entry point.

.. code-block:: console

    daelab train --config run.json --out-dir runs/ae
    daelab dae --model vae --seed 3
    daelab width_study --replications 10 --seed 0
    daelab oracles
    daelab diagnose --checkpoint runs/ae/checkpoint.json
"""

import argparse
import logging
import sys

from . import __version__
from .experiments import TRAINING_KINDS, read_config_file, run_experiment
from .util import ConfigError


__all__ = ['build_parser', 'subcommand_kind', 'main']


# subcommand -> model kind -> experiment kind
_TRAINING_SUBCOMMANDS = {
    'train': {'ae': 'baseline_ae', 'vae': 'baseline_vae', 'vq': 'vq_ae'},
    'dae': {'ae': 'dae_ae', 'vae': 'dae_vae', 'vq': 'dae_vq'},
}


def subcommand_kind(subcommand, model=None, config_kind=None):
    """Experiment kind run by a subcommand.

    ``train`` and ``dae`` keep the model kind of a training configuration
    (``ae`` otherwise) unless ``model`` is given, and select its
    single-stage or two-stage variant respectively.

    Parameters
    ----------
    subcommand : str
    model : {'ae', 'vae', 'vq'} or None
    config_kind : str or None
        ``kind`` entry of the configuration file, if any

    Returns
    -------
    kind : str
    """
    if subcommand not in _TRAINING_SUBCOMMANDS:
        return subcommand
    if model is None:
        model = TRAINING_KINDS.get(config_kind, ('ae', False))[0]
    return _TRAINING_SUBCOMMANDS[subcommand][model]


def build_parser():
    parser = argparse.ArgumentParser(
        prog='daelab',
        description='Decoupled Autoencoder experiments on a toy mixture.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s {}'.format(__version__))

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--config', default=None,
                        help='JSON configuration file (defaults are used for '
                             'missing entries)')
    shared.add_argument('--seed', type=int, default=None,
                        help='base seed, overrides the configuration')
    shared.add_argument('--out-dir', default=None,
                        help='output directory, overrides the configuration')
    shared.add_argument('--replications', type=int, default=None,
                        help='replication count, overrides the '
                             'configuration')
    shared.add_argument('-v', '--verbose', action='store_true',
                        help='log progress information')
    shared.add_argument('--progress', action='store_true',
                        help='show progress bars')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for name, help_text in (
            ('train', 'train a single-stage autoencoder'),
            ('dae', 'train a Decoupled Autoencoder in two stages')):
        sub = subparsers.add_parser(name, parents=[shared], help=help_text)
        sub.add_argument('--model', choices=['ae', 'vae', 'vq'],
                         default=None,
                         help='model kind, defaults to the configuration\'s '
                              'or ae')
    subparsers.add_parser('width_study', parents=[shared],
                          help='replicate the encoder/decoder width '
                               'comparison')
    subparsers.add_parser('oracles', parents=[shared],
                          help='run the closed-form oracle checks')
    sub = subparsers.add_parser('diagnose', parents=[shared],
                                help='probe a stored checkpoint')
    sub.add_argument('--checkpoint', default=None,
                     help='checkpoint file, overrides analysis.checkpoint')
    return parser


def _setup_logging(verbose):
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)


def main(argv=None):
    """Run the command line and return its exit code.

    Exit codes are 0 on success, 2 for an invalid configuration, 3 for a
    numeric abort, 4 for failed acceptance checks and 1 otherwise.
    """
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)

    try:
        config_kind = read_config_file(args.config).get('kind')
        if not isinstance(config_kind, str):
            config_kind = None
    except ConfigError:
        # reported by run_experiment
        config_kind = None
    kind = subcommand_kind(args.command, getattr(args, 'model', None),
                           config_kind)
    config = {} if args.config is None else args.config
    return run_experiment(
        config, seed=args.seed, out_dir=args.out_dir,
        replications=args.replications, kind=kind,
        checkpoint=getattr(args, 'checkpoint', None), verbose=args.verbose,
        show_progress=args.progress)


if __name__ == '__main__':
    sys.exit(main())
