"""Polygons built from rank-one Hermitian matrices, their bending flows and action-angle coordinates."""

__version__ = "0.1.0"
