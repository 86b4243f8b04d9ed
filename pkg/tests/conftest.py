import pytest

from dyninfer.examples import example_section33, example_stock
from dyninfer.formats import dump_problem


@pytest.fixture
def toggle():
    return example_section33(6)


@pytest.fixture
def stock():
    return example_stock(6)


@pytest.fixture
def model_file(tmp_path):
    """Writes a problem as a model JSON file and returns its path."""
    def write(problem, name="model.json"):
        filename = tmp_path / name
        filename.write_text(dump_problem(problem), encoding="utf-8")
        return str(filename)

    return write
