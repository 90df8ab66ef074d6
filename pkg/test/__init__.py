"""
smcdma Test Suite

Unit tests for the signal model, adaptive receivers, bounds, estimators,
analysis oracles and metrics, plus integration tests of the harness and the
command-line interface.

Run tests with:
    pytest test/
    pytest test/test_sm_filters.py
    pytest test/ -m slow
    pytest test/ --cov=src/smcdma
"""
