import pytest

from meshcert.model import MeshDataset


def unit_triangle() -> MeshDataset:
    return MeshDataset.build([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)], [0, 2, 1])


def kite() -> MeshDataset:
    # (1, -0.1) sits inside the circumcircle of the upper triangle
    return MeshDataset.build(
        [(0, 0), (2, 0), (1, 2), (1, -0.1)],
        [(0, 1, 2), (1, 0, 3)],
        [0, 2, 1, 3],
    )


def fan_of_three() -> MeshDataset:
    # i, j, l outer triangle with k inside; triangles ijk, jlk, kli
    i, j, k, l = 0, 1, 2, 3
    return MeshDataset.build(
        [(0, 0), (3, 0), (1, 1), (0, 3)],
        [(i, j, k), (j, l, k), (k, l, i)],
        [i, l, j],
    )


def overlapping_triple() -> MeshDataset:
    # A inside BCD; ABC and ACD both overlap BCD
    B, C, D, A = 0, 1, 2, 3
    return MeshDataset.build(
        [(0, 0), (4, 0), (0, 4), (1, 1)],
        [(B, C, D), (A, B, C), (A, C, D)],
        [B, D, C],
    )


def thread() -> MeshDataset:
    # square with an interior crack from (1,2) to (3,2): the lower side is
    # split at (2,2), the upper side at (2.5,2), so edges overlap along it
    return MeshDataset.build(
        [(0, 0), (4, 0), (4, 4), (0, 4), (1, 2), (3, 2), (2, 2), (2.5, 2)],
        [(6, 0, 1), (6, 4, 0), (5, 6, 1), (1, 2, 5), (0, 4, 3), (4, 7, 3), (7, 5, 2), (7, 2, 3)],
        [0, 3, 2, 1],
    )


def square_split() -> MeshDataset:
    return MeshDataset.build(
        [(0, 0), (2, 0), (2, 2), (0, 2)],
        [(0, 1, 2), (0, 2, 3)],
        [0, 3, 2, 1],
    )


@pytest.fixture
def small_meshes():
    from meshcert.testkit import DistributionSpec, generate_points, reference_delaunay

    return [
        reference_delaunay(generate_points(DistributionSpec(kind, n, seed)))
        for seed, (kind, n) in enumerate(
            [("uniform", 40), ("normal", 60), ("cluster", 80), ("grid", 100), ("uniform", 7)]
        )
    ]


# --------------------------------------------------------------------------
# acceptance lines: one PASS/FAIL line per criterion, printed inline and in
# the terminal summary


_ACCEPTANCE: list[str] = []


class _Criterion:
    def __init__(self, label: str):
        self.label = label
        self.detail = ""


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_passed = rep.passed


@pytest.fixture
def criterion(request):
    c = _Criterion(request.node.get_closest_marker("criterion").args[0])
    yield c
    ok = getattr(request.node, "call_passed", False)
    line = f"{'PASS' if ok else 'FAIL'}  {c.label}  {c.detail}".rstrip()
    _ACCEPTANCE.append(line)
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported as one PASS/FAIL line")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
