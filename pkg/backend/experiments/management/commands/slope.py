"""
Fit the log-log slope of a recorded MSE curve.

Usage:
    python manage.py slope --in run.csv --tmin 500 --tmax 3000
"""
from django.core.management.base import BaseCommand

from bandits.exceptions import UsageError
from bandits.policies import PolicyKind
from experiments.curves import fit_loglog_slope
from experiments.emit import read_curves
from experiments.management.commands._options import translate_errors


class Command(BaseCommand):
    help = 'Print the least-squares slope of log(mse_mean) against log(round).'

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='in_path', required=True, help='Curve file written by simulate')
        parser.add_argument('--tmin', type=float, help='First round included (default: first recorded)')
        parser.add_argument('--tmax', type=float, help='Last round included (default: last recorded)')
        parser.add_argument('--policy', default=PolicyKind.ORTH_BATCH.value, help='Policy whose curve is fitted')

    def handle(self, *args, **options):
        with translate_errors():
            curves = {curve.policy: curve for curve in read_curves(options['in_path'])}
            policy = options['policy']
            if policy not in curves:
                found = ', '.join(curves) or 'none'
                raise UsageError(f'No curve for policy {policy!r} in {options["in_path"]} (found: {found}).')
            curve = curves[policy]
            t_min = options['tmin'] if options['tmin'] is not None else float(curve.rounds[0])
            t_max = options['tmax'] if options['tmax'] is not None else float(curve.rounds[-1])
            slope = fit_loglog_slope(curve, t_min, t_max)
            self.stdout.write(format(slope, '.17g'))
