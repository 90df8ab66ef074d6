"""
smcdma Utilities: logging setup, CSV export and seed derivation.
"""
