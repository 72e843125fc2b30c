"""Shared fixtures: the packaged example CSVs, parsed once per session."""

from importlib import resources

import pytest

from revdoe import cli_reporting


def _fixture_text(name: str) -> str:
    return (resources.files("revdoe") / "fixtures" / f"{name}.csv").read_text(encoding="utf-8")


def load_design(name: str):
    return cli_reporting.parse_design_csv(_fixture_text(name), name)


def load_dataset(name: str, label: str | None = None):
    return cli_reporting.parse_cost_csv(_fixture_text(name), name, label=label)


@pytest.fixture(scope="session")
def irs_design():
    return load_design("irs_cells")


@pytest.fixture(scope="session")
def crs_design():
    return load_design("crs_cells")


@pytest.fixture(scope="session")
def drs_table_design():
    return load_design("drs_cells_table")


@pytest.fixture(scope="session")
def drs_equation_design():
    return load_design("drs_cells_equation")


@pytest.fixture(scope="session")
def irs_dataset():
    return load_dataset("irs_generated", label="IRS")


@pytest.fixture(scope="session")
def crs_dataset():
    return load_dataset("crs_generated", label="CRS")


@pytest.fixture(scope="session")
def drs_dataset():
    return load_dataset("drs_generated", label="DRS")
