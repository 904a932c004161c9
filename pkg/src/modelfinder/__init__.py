"""Bounded model validator for UML class models with OCL invariants."""

from importlib import resources

__version__ = "0.1.0"


def corpus_path(name: str):
    """Filesystem path of a bundled corpus file, e.g. 'carrental.use'."""
    return resources.files(__name__).joinpath("corpus", name)
