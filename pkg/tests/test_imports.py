"""Smoke test: every module imports and the CLI is wired."""

import importlib

import pytest

MODULES = [
    "dalpha_seeding",
    "dalpha_seeding.config",
    "dalpha_seeding.constants",
    "dalpha_seeding.exceptions",
    "dalpha_seeding.core.geometry",
    "dalpha_seeding.core.seeding",
    "dalpha_seeding.core.lloyd",
    "dalpha_seeding.core.diagnostics",
    "dalpha_seeding.core.potential",
    "dalpha_seeding.instances",
    "dalpha_seeding.data.storage",
    "dalpha_seeding.services.experiment_service",
    "dalpha_seeding.services.plotting",
    "dalpha_seeding.utils.logging",
    "dalpha_seeding.utils.rng",
    "dalpha_seeding.utils.validators",
    "dalpha_seeding.cli.main",
]


@pytest.mark.parametrize("name", MODULES)
def test_module_imports(name):
    assert importlib.import_module(name) is not None


def test_cli_commands_registered():
    from dalpha_seeding.cli.main import app

    names = {command.name for command in app.registered_commands}
    assert {"generate", "seed", "lloyd", "params", "verify", "sweep", "bound", "families"} <= names
