import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsrsim.frame import Frame  # noqa: E402
from dsrsim.pipeline import Shader, Triangle, Vertex  # noqa: E402


def random_frame(rng, width, height):
    px = rng.integers(0, 256, size=(height, width, 4), dtype=np.uint8)
    px[..., 3] = 255
    return Frame(width, height, px)


def random_scene(rng, width, height, count):
    kinds = [Shader("FLAT"), Shader("GOURAUD"), Shader("CHECKER", 3.0)]
    tris = []
    for _ in range(count):
        verts = []
        for _ in range(3):
            verts.append(
                Vertex(
                    float(rng.uniform(-8, width + 8)),
                    float(rng.uniform(-8, height + 8)),
                    float(rng.uniform(0.05, 0.95)),
                    tuple(float(c) for c in rng.uniform(0, 1, 3)) + (1.0,),
                    (float(rng.uniform(0, 20)), float(rng.uniform(0, 20))),
                )
            )
        tris.append(Triangle(*verts, kinds[int(rng.integers(0, 3))]))
    return tris


def full_screen_triangle(width, height, color=(0.2, 0.6, 0.9, 1.0), z=0.5):
    big = 4 * max(width, height)
    return Triangle(
        Vertex(-1.0, -1.0, z, color),
        Vertex(big, -1.0, z, color),
        Vertex(-1.0, big, z, color),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
