"""
Run a Monte Carlo experiment and emit aggregated curves.

Usage:
    python manage.py simulate --dim 5 --rounds 3000 --trials 1000 --out run.csv

With ``--out`` the bound curves for the same parameters are written next to
the curves as ``<stem>.bounds<suffix>``. Without it, curves go to stdout.
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from experiments.curves import CURVE_COLUMNS, bound_records
from experiments.emit import check_format, curve_rows, emit, render_table
from experiments.harness import resolve_workers, run_experiment
from experiments.management.commands._options import (
    add_experiment_arguments,
    add_output_arguments,
    build_config,
    translate_errors,
)


logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Run policies over Monte Carlo trials and emit MSE and regret curves.'

    def add_arguments(self, parser):
        add_experiment_arguments(parser)
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with translate_errors():
            config, output = build_config(options)
            check_format(output['format'])
            workers = resolve_workers(output.get('workers'), getattr(settings, 'LINBANDIT_THREADS', None))
            logger.info('Using %d worker process(es)', workers)
            curves = run_experiment(config, workers=workers)

            if output.get('out'):
                emit(curves, bound_records(config), output['out'], output['format'])
            else:
                self.stdout.write(render_table(curve_rows(curves), CURVE_COLUMNS, output['format']), ending='')
