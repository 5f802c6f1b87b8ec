import numpy as np
import pytest
from PIL import Image

from gaborvfd.imaging import GrayImage

ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_gray(rng, h, w, levels=256):
    return GrayImage(rng.integers(0, levels, (h, w)), levels)


def write_png(path, array, mode=None):
    Image.fromarray(np.asarray(array, dtype=np.uint8), mode=mode).save(path)


@pytest.fixture
def tiny_tree(tmp_path):
    """Two classes of three 24x24 PNG/PGM images each."""
    r = np.random.default_rng(3)
    root = tmp_path / "data"
    for cname, scale in (("bark", 40), ("brick", 200)):
        d = root / cname
        d.mkdir(parents=True)
        for i in range(3):
            arr = np.clip(r.normal(scale, 20, (24, 24)), 0, 255)
            write_png(d / f"img{i}.png" if i % 2 == 0 else d / f"img{i}.pgm", arr)
    return root
