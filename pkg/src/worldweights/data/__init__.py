"""Bundled ensemble definition files (toy1, toy2)."""

from __future__ import annotations

from importlib import resources

_NAMES = ("toy1", "toy2")


def bundled_names() -> tuple[str, ...]:
    return _NAMES


def bundled_example(name: str):
    """Return a readable handle to a bundled definition file by short name."""
    if name not in _NAMES:
        raise KeyError(f"no bundled example named {name!r}; have {_NAMES}")
    return resources.files(__name__).joinpath(f"{name}.json")
