"""
Run OFU against the orthonormal-batch policy and print the plateau/decay summary.

Usage:
    python manage.py compare --trials 1000 --rounds 3000
"""
import dataclasses
import io
import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from bandits.policies import PolicyKind
from experiments.curves import bound_records, summarize
from experiments.emit import check_format, emit
from experiments.harness import resolve_workers, run_experiment
from experiments.management.commands._options import (
    add_experiment_arguments,
    add_output_arguments,
    build_config,
    translate_errors,
)


logger = logging.getLogger(__name__)

COMPARED = (PolicyKind.OFU, PolicyKind.ORTH_BATCH)


def _optional(value, spec: str = '.4g') -> str:
    return 'n/a' if value is None else format(value, spec)


def render_summary(summary, config) -> str:
    """Plain-text report of ``summarize`` output."""
    out = io.StringIO()
    out.write(
        f'd={config.dim} T={config.rounds} trials={config.trials} '
        f'sigma={config.sigma:g} kappa={config.kappa:g} S={config.theta_norm:g} delta={config.delta:g}\n'
    )
    out.write(f'{"policy":<12}{"t_early":>9}{"mse_early":>13}{"t_final":>9}{"mse_final":>13}{"stderr":>12}{"ratio":>9}\n')
    for item in summary['policies']:
        out.write(
            f'{item.policy:<12}{item.early_round:>9d}{item.early_mse:>13.4e}'
            f'{item.final_round:>9d}{item.final_mse:>13.4e}{item.final_stderr:>12.2e}{item.ratio:>9.3f}\n'
        )
    if 'orth_exact_mse' in summary:
        out.write(f'orth-batch log-log slope over [T/6, T]: {_optional(summary.get("orth_slope"))}\n')
        out.write(f'orth-batch exact expected MSE after completed batches: {summary["orth_exact_mse"]:.4e}\n')
    if 'ofu_floor' in summary:
        out.write(f'ofu plateau floor sigma^2 (1 - delta): {summary["ofu_floor"]:.4g}\n')
        out.write(
            f'ofu trials with final squared error >= sigma^2: '
            f'{_optional(summary.get("ofu_failure_fraction"), ".3f")} (reference 1 - delta = {1 - config.delta:.3f})\n'
        )
    return out.getvalue()


class Command(BaseCommand):
    help = 'Compare OFU and the orthonormal-batch policy on MSE plateau versus decay.'

    def add_arguments(self, parser):
        add_experiment_arguments(parser, policies=False)
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with translate_errors():
            config, output = build_config(options)
            check_format(output['format'])
            config = dataclasses.replace(config, policies=COMPARED)
            workers = resolve_workers(output.get('workers'), getattr(settings, 'LINBANDIT_THREADS', None))
            logger.info('Using %d worker process(es)', workers)
            curves = run_experiment(config, workers=workers)
            if output.get('out'):
                emit(curves, bound_records(config), output['out'], output['format'])
            self.stdout.write(render_summary(summarize(curves, config), config), ending='')
