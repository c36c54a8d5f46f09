"""Tests for the density-dependent elasticity solver."""
