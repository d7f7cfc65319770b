import itertools

import numpy as np
import pytest

from occlude import OcclusionGraph, SceneObject


def brute_force_order(graph):
    """Smallest (by input index) permutation that respects every edge.

    Independent of the Kahn implementation: enumerates all permutations.
    """
    ids = graph.ids
    for perm in itertools.permutations(range(len(ids))):
        pos = {ids[i]: k for k, i in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in graph.edges):
            return [ids[i] for i in perm]
    return None


def painter(objects_front_to_back, width, height, background):
    """Back-to-front overwrite of 8-bit colors on the half-open pixel-center grid."""
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = background
    for obj in reversed(objects_front_to_back):
        x0, y0, x1, y1 = obj.bbox
        for r in range(height):
            for c in range(width):
                cx, cy = (c + 0.5) / width, (r + 0.5) / height
                if x0 <= cx < x1 and y0 <= cy < y1:
                    img[r, c] = [round(255 * v) for v in obj.color]
    return img


def random_dag_edges(rng, ids, density=0.5):
    """Random edges consistent with a random hidden total order of ``ids``."""
    hidden = list(rng.permutation(ids))
    edges = []
    for i in range(len(hidden)):
        for j in range(i + 1, len(hidden)):
            if rng.random() < density:
                edges.append((hidden[i], hidden[j]))
    return edges


def random_box(rng, grid=8):
    # Box edges on a coarse lattice so they never degenerate at >= grid resolution.
    x0, x1 = sorted(rng.choice(grid + 1, size=2, replace=False))
    y0, y1 = sorted(rng.choice(grid + 1, size=2, replace=False))
    return (x0 / grid, y0 / grid, x1 / grid, y1 / grid)


def random_color8(rng):
    return tuple(int(v) / 255 for v in rng.integers(0, 256, size=3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def red_over_blue():
    objects = [
        SceneObject("red", ("red", "box"), (0.0, 0.0, 0.5, 0.5), 0.999999, color=(1.0, 0.0, 0.0)),
        SceneObject("blue", ("blue", "box"), (0.25, 0.25, 0.75, 0.75), 0.999999, color=(0.0, 0.0, 1.0)),
        SceneObject("bg", (), (0.0, 0.0, 1.0, 1.0), 0.999999, color=(1.0, 1.0, 1.0)),
    ]
    return OcclusionGraph(objects, [("red", "blue"), ("blue", "bg"), ("red", "bg")])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
