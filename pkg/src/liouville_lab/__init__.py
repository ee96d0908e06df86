"""Radial shooting and identity checks for coupled polyharmonic equations with power weights."""
