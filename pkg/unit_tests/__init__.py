"""Unit tests for the whole project."""
