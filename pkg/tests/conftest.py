import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long-running statistical checks and full-scale scans")
