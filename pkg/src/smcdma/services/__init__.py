"""
smcdma Services Package

Signal synthesis, adaptive receivers, bound controllers, estimators,
closed-form oracles, metrics and the Monte-Carlo harness.
"""
