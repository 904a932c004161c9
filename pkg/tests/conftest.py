import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modelfinder import corpus_path
from modelfinder.config import parse_config_file
from modelfinder.parsing import parse_model


@pytest.fixture(scope="session")
def corpus_model():
    return parse_model(corpus_path("carrental.use").read_text(), "carrental.use")


@pytest.fixture(scope="session")
def corpus_configs(corpus_model):
    return parse_config_file(corpus_path("carrental.properties").read_text(),
                             corpus_model, "carrental.properties")
