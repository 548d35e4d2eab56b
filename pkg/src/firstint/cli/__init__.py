"""Command-line interface for firstint."""
