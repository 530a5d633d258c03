import datetime as dt
from pathlib import Path

import pytest

from mlndash.demo_data import generate_demo_data


def d(day: int) -> dt.date:
    """Shorthand for test dates: day 1 is 2020-06-01, later days roll over."""
    return dt.date(2020, 6, 1) + dt.timedelta(days=day - 1)


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("demo")
    generate_demo_data(out)
    return out
