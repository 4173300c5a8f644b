"""Experiment configs, sweeps, AoI trace replay and the CLI."""
