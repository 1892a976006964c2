"""
Evaluate the closed-form bounds on the recording grid.

Usage:
    python manage.py bounds --dim 5 --rounds 3000 --out bounds.csv
"""
from django.core.management.base import BaseCommand

from experiments.curves import BOUND_COLUMNS, bound_records
from experiments.emit import emit_bounds, render_table
from experiments.management.commands._options import (
    add_experiment_arguments,
    add_output_arguments,
    build_config,
    translate_errors,
)


class Command(BaseCommand):
    help = 'Emit the MSE, tail, floor and regret bound curves for the given parameters.'

    def add_arguments(self, parser):
        add_experiment_arguments(parser)
        add_output_arguments(parser, workers=False)

    def handle(self, *args, **options):
        with translate_errors():
            config, output = build_config(options)
            rows = bound_records(config)
            if output.get('out'):
                emit_bounds(rows, output['out'], output['format'])
            else:
                self.stdout.write(render_table(rows, BOUND_COLUMNS, output['format']), ending='')
