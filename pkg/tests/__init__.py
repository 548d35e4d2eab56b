"""Test suite for firstint."""
