"""Bundled example grammars, corpora, and n-best data."""

from importlib import resources


def path(name: str) -> str:
    """Filesystem path of a bundled data file."""
    return str(resources.files(__package__) / name)


def read_text(name: str) -> str:
    return (resources.files(__package__) / name).read_text(encoding="utf-8")
