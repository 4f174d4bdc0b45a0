"""Tests for the lambdamu workbench."""
