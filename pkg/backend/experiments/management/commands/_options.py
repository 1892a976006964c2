"""
Arguments and error translation shared by the experiment commands.

Parameter values are layered: ``settings.LINBANDIT_DEFAULTS``, then the JSON
document given with ``--config``, then explicit flags. Flags default to
None so that an absent flag never masks a config file value.
"""
from contextlib import contextmanager
from dataclasses import fields
from typing import Any, Dict, Iterator, Mapping, Tuple

from django.conf import settings
from django.core.management.base import CommandError, CommandParser

from bandits.environment import NoiseKind
from bandits.exceptions import BanditError, UsageError
from experiments.config import ExperimentConfig, ThetaMode, load_config_file, merge_layers
from experiments.emit import FORMATS


EXPERIMENT_FIELDS = tuple(f.name for f in fields(ExperimentConfig))
OUTPUT_KEYS = ('out', 'format', 'workers')


def add_experiment_arguments(parser: CommandParser, policies: bool = True) -> None:
    """
    Register the experiment parameter flags.

    Args:
        parser: Command parser
        policies: Whether ``--policies`` is offered
    """
    parser.add_argument('--config', help='JSON document mirroring the flags; flags win')
    parser.add_argument('--dim', type=int, help='Dimension d')
    parser.add_argument('--rounds', type=int, help='Rounds per trial T')
    parser.add_argument('--trials', type=int, help='Number of Monte Carlo trials')
    if policies:
        parser.add_argument('--policies', help='Comma-separated subset of ofu,orth-batch,random')
    parser.add_argument('--sigma', type=float, help='Noise scale')
    parser.add_argument('--kappa', type=float, help='Regularizer scale, W0 = kappa * I')
    parser.add_argument('--theta-norm', dest='theta_norm', type=float, help='Norm S of the hidden parameter')
    parser.add_argument('--theta-mode', dest='theta_mode', choices=ThetaMode.values)
    parser.add_argument('--seed', type=int, help='Master seed')
    parser.add_argument('--record-every', dest='record_every', type=int, help='Recording stride')
    parser.add_argument(
        '--beta-literal', dest='beta_literal', action='store_true', default=None,
        help='Use sigma^2 as the leading factor of the OFU confidence radius',
    )
    parser.add_argument(
        '--shared-noise', dest='shared_noise', action='store_true', default=None,
        help='Give every policy the same noise stream within a trial',
    )
    parser.add_argument('--delta', type=float, help='Failure probability in (0, 1)')
    parser.add_argument('--noise', choices=NoiseKind.values, help='Noise family')


def add_output_arguments(parser: CommandParser, workers: bool = True) -> None:
    """Register ``--out``, ``--format`` and optionally ``--workers``."""
    parser.add_argument('--out', help='Output path; stdout when omitted')
    parser.add_argument('--format', choices=FORMATS, help='Output format')
    if workers:
        parser.add_argument('--workers', type=int, help='Worker processes, capped by LINBANDIT_THREADS')


def _split_output(layer: Mapping[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    experiment: Dict[str, Any] = {}
    output: Dict[str, Any] = {}
    for raw_key, value in layer.items():
        key = str(raw_key).replace('-', '_')
        if key in OUTPUT_KEYS:
            output[key] = value
        else:
            experiment[key] = value
    return experiment, output


def build_config(options: Mapping[str, Any]) -> Tuple[ExperimentConfig, Dict[str, Any]]:
    """
    Merge settings defaults, the config file and the flags.

    Args:
        options: Parsed command options

    Returns:
        Tuple[ExperimentConfig, Dict[str, Any]]: The validated config and the
            resolved output options (``out``, ``format``, ``workers``)

    Raises:
        UsageError: On an unreadable config file or invalid values
    """
    defaults, output_defaults = _split_output(getattr(settings, 'LINBANDIT_DEFAULTS', {}))
    file_layer: Dict[str, Any] = {}
    file_output: Dict[str, Any] = {}
    if options.get('config'):
        file_layer, file_output = _split_output(load_config_file(options['config']))

    flags = {name: options.get(name) for name in EXPERIMENT_FIELDS}
    config = merge_layers(defaults, file_layer, flags)

    output: Dict[str, Any] = {'format': 'csv'}
    for layer in (output_defaults, file_output, {key: options.get(key) for key in OUTPUT_KEYS}):
        output.update({key: value for key, value in layer.items() if value is not None})
    return config, output


@contextmanager
def translate_errors() -> Iterator[None]:
    """
    Convert library errors to ``CommandError`` with the CLI exit codes.

    Usage errors exit with 2; domain and I/O failures exit with 1.
    """
    try:
        yield
    except UsageError as exc:
        raise CommandError(exc.message, returncode=2) from exc
    except BanditError as exc:
        raise CommandError(exc.message, returncode=1) from exc
    except OSError as exc:
        raise CommandError(str(exc), returncode=1) from exc
