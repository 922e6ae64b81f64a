"""Interface layer helpers."""
