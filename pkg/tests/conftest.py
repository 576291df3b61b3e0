"""Shared fixtures: analyses are expensive, so build each once per session."""

import pytest

from misere_quotients import builder, verifier


@pytest.fixture(scope="session")
def qa123_12():
    return builder.build_quotient("0.123", 12)


@pytest.fixture(scope="session")
def qa123(qa123_12):
    cert = verifier.certify_period(qa123_12, 6, 5)
    assert cert is not None
    return cert


@pytest.fixture(scope="session")
def qa123_20():
    return builder.build_quotient("0.123", 20)


@pytest.fixture(scope="session")
def kayles():
    return builder.kayles_analysis()
