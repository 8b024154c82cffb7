import pytest

from tsmp.graph import exploration_cost, validate
from tsmp.storage import dumps
from tsmp.synthetic import SpecError, SyntheticSpec, generate_synthetic


def test_deterministic():
    spec = SyntheticSpec(vertex_count=300, line_count=12, seed=5)
    assert dumps(generate_synthetic(spec)) == dumps(generate_synthetic(spec))


def test_seed_changes_graph():
    a = generate_synthetic(SyntheticSpec(vertex_count=120, line_count=6, seed=1))
    b = generate_synthetic(SyntheticSpec(vertex_count=120, line_count=6, seed=2))
    assert dumps(a) != dumps(b)


def test_shape_and_validity():
    spec = SyntheticSpec(vertex_count=300, line_count=12, stops_per_line=20, seed=0)
    g = generate_synthetic(spec)
    assert len(g.vertices) == 300
    # each line runs both ways
    assert len(g.edges) == 12 * 2 * 19
    assert len({e.bus for e in g.edges}) == 24
    assert validate(g) == []


def test_admissible(small_graph):
    for e in small_graph.edges:
        assert exploration_cost(small_graph, e.source, e.target) <= e.ride


def test_headway_and_span():
    spec = SyntheticSpec(vertex_count=50, line_count=2, stops_per_line=5, headway=600,
                         service_span=(6 * 3600, 7 * 3600), seed=3)
    g = generate_synthetic(spec)
    for v in g.vertices.values():
        for ts in v.schedule.values():
            assert all(b - a == 600 for a, b in zip(ts, ts[1:]))
            assert ts[0] >= 6 * 3600 and ts[-1] - ts[0] <= 3600 + 600
    # trips keep running times consistent with edge rides
    for e in g.edges:
        src = g.vertices[e.source].schedule[e.bus]
        dst = g.vertices[e.target].schedule[e.bus]
        assert [d - s for s, d in zip(src, dst)] == [e.ride] * len(src)


@pytest.mark.parametrize("kw", [
    dict(vertex_count=10, stops_per_line=11),
    dict(vertex_count=1),
    dict(line_count=0),
    dict(stops_per_line=1),
    dict(headway=0),
    dict(service_span=(10, 5)),
])
def test_bad_spec(kw):
    with pytest.raises(SpecError):
        generate_synthetic(SyntheticSpec(**kw))
