import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steklov.harness.verify import load_spec, verify  # noqa: E402


def corpus_paths():
    root = resources.files("steklov.harness").joinpath("corpus")
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


@pytest.fixture(scope="session")
def corpus_dir():
    return corpus_paths()[0].parent


@pytest.fixture(scope="session")
def corpus_reports():
    """Verification reports of the whole bundled corpus, computed once per session."""
    return {p.stem: verify(load_spec(p)) for p in corpus_paths()}
