"""Spectral analysis of junctions of periodic Schrödinger operators."""
