"""
Experiments app configuration.

This app runs Monte Carlo experiments over the bandit library, aggregates
per-round MSE and regret curves, evaluates bound curves and exposes the
``simulate``, ``bounds``, ``slope`` and ``compare`` management commands.
"""
from django.apps import AppConfig


class ExperimentsConfig(AppConfig):
    """Configuration for the experiments application."""

    name = 'experiments'
    verbose_name = 'Experiments'
