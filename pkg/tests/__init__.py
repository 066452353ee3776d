"""Tests for rotational_geodesics."""
