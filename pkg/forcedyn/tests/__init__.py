"""Tests for the forcedyn package."""
