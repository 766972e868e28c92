import numpy as np
import pytest

from lapmaneuver import FormationGraph, ReferenceShape, center_shape


def square_graph() -> FormationGraph:
    return FormationGraph(4, ((1, 2), (2, 3), (3, 4), (4, 1), (1, 3)))


def square_shape() -> ReferenceShape:
    return center_shape([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])


def decagon_graph() -> FormationGraph:
    return FormationGraph(10, tuple((k + 1, (k + 1) % 10 + 1) for k in range(10)))


def decagon_shape() -> ReferenceShape:
    theta = 2 * np.pi * np.arange(10) / 10
    r = 1.0 / (2.0 * np.sin(np.pi / 10))
    return center_shape(r * np.exp(1j * theta))


def random_instance(n: int, seed: int):
    """Random 2-rooted graph (cycle plus chords) with a random shape."""
    rng = np.random.default_rng(seed)
    edges = [(k + 1, (k + 1) % n + 1) for k in range(n)]
    present = {frozenset(e) for e in edges}
    extra = rng.integers(0, max(1, n // 2), endpoint=True)
    for _ in range(extra):
        i, j = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        if frozenset((int(i), int(j))) not in present:
            edges.append((int(i), int(j)))
            present.add(frozenset((int(i), int(j))))
    g = FormationGraph(n, tuple(edges))
    while True:
        pts = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        shape = center_shape(pts)
        if all(shape.edge_vector(i, j) != 0 for i, j in g.oriented_edges):
            return g, shape


@pytest.fixture
def square():
    return square_graph(), square_shape()


@pytest.fixture
def decagon():
    return decagon_graph(), decagon_shape()
