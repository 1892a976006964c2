"""
Bandits app configuration.

This app holds the numerical library: linear algebra helpers, the
stochastic linear bandit environment, the regularized least-squares
estimator, the action-selection policies and the bound evaluators.
"""
from django.apps import AppConfig


class BanditsConfig(AppConfig):
    """Configuration for the bandits application."""

    name = 'bandits'
    verbose_name = 'Linear Bandits'
