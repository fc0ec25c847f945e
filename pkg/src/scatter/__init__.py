"""Scattering diagrams and theta functions for mirror families of del Pezzo surfaces."""

__version__ = "0.1.0"
