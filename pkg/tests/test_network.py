import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slhnet import fixtures
from slhnet.components import beam_splitter, figure6_network, passthrough, rotation
from slhnet.errors import NetworkError
from slhnet.network import (Network, adjacency, build_network_V, concat_all, make_adjacency,
                            split_port, validate)
from slhnet.ops import maxabs
from slhnet.sampling import random_slh
from slhnet.slh import SLH, build_V, concat


def scalar(S, L, H=0.0):
    return SLH([[S]], [[L]], [[H]])


def test_split_port():
    assert split_port("plant.out1") == ("plant", "out1")
    for bad in ("plant", ".x", "x.", 3):
        with pytest.raises(ValueError):
            split_port(bad)


def test_single_component_network_V(rng):
    t = random_slh(rng, 2, (1, 1))
    net = Network([("c", t)])
    assert maxabs(build_network_V(net).data - build_V(t).data) == 0
    assert [p.label for p in build_network_V(net).in_ports] == ["c.in1", "c.in2"]


def test_two_scalar_network_V():
    t1, t2 = scalar(np.exp(0.4j), 0.3), scalar(np.exp(-1j), 0.7 + 0.1j)
    v = build_network_V(Network([("a", t1), ("b", t2)], [("a.out", "b.in")])).data
    L1, L2 = 0.3, 0.7 + 0.1j
    expected = np.array([
        [-0.5 * abs(L1) ** 2 - 0.5 * abs(L2) ** 2, -np.conj(L1) * t1.S[0, 0], -np.conj(L2) * t2.S[0, 0]],
        [L1, t1.S[0, 0], 0],
        [L2, 0, t2.S[0, 0]],
    ])
    assert maxabs(v - expected) < 1e-15


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_concat_associative(seed):
    rng = np.random.default_rng(seed)
    vs = [build_V(random_slh(rng, 2, (1,), in_labels=[f"i{k}"], out_labels=[f"o{k}"]))
          for k in range(3)]
    left = concat(concat(vs[0], vs[1]), vs[2])
    right = concat(vs[0], concat(vs[1], vs[2]))
    assert maxabs(left.data - right.data) < 1e-15
    assert maxabs(concat_all(vs).data - left.data) == 0


def test_adjacency_figure6_is_swap():
    net = figure6_network(passthrough(2), rotation(0.3))
    eta = adjacency(net)
    assert np.array_equal(eta.pattern, [[0, 1], [1, 0]])
    assert np.array_equal(eta.data, np.kron([[0, 1], [1, 0]], np.eye(2)))


def test_adjacency_matched_order_is_identity():
    net = Network([("a", scalar(1, 0)), ("b", scalar(1, 0)), ("c", scalar(1, 0))],
                  [("a.out", "b.in"), ("b.out", "c.in")])
    assert np.array_equal(adjacency(net).pattern, np.eye(2))


def test_adjacency_single_edge():
    net = Network([("a", scalar(1, 0)), ("b", scalar(1, 0))], [("a.out", "b.in")])
    eta = adjacency(net)
    assert np.array_equal(eta.data, [[1]]) and eta.edges == (("a.out", "b.in"),)


def test_adjacency_multiplicity_blocks():
    t = SLH(np.eye(4), np.zeros((4, 1)), [[0]], [("x", 2), ("y", 2)], [("u", 2), ("v", 2)])
    eta = make_adjacency([("v", "x")], t.out_ports, t.in_ports, 1)
    assert np.array_equal(eta.data, np.eye(2))


def test_figure2_valid():
    net = fixtures.figure2().to_network()
    assert validate(net) == []
    assert [p.label for p in net.external_inputs] == ["C2.in", "C3.in1", "C3.in2"]
    assert [p.label for p in net.external_outputs] == ["C1.s2", "C2.out", "C3.out2"]
    assert [p.label for p in net.internal_outputs] == ["C1.s1", "C3.out1"]


def test_multiplicity_violation():
    a = SLH(np.eye(2), np.zeros((2, 1)), [[0]], [("in", 2)], [("out", 2)])
    b = SLH(np.eye(2), np.zeros((2, 1)), [[0]], ["i1", "i2"], ["o1", "o2"])
    problems = validate(Network([("a", a), ("b", b)], [("a.out", "b.i1")]))
    assert [v.rule for v in problems] == ["multiplicity"]


def test_port_used_twice():
    bs = beam_splitter(np.eye(2))
    net = Network([("bs", bs)], [("bs.out1", "bs.in1"), ("bs.out1", "bs.in2")])
    assert [v.rule for v in validate(net)] == ["exactly-one-channel"]


def test_other_violations():
    t = scalar(1, 0)
    assert [v.rule for v in validate(Network([]))] == ["empty"]
    rules = {v.rule for v in validate(Network([("a", t), ("a", t)]))}
    assert "duplicate-component" in rules
    assert [v.rule for v in validate(Network([("a.b", t)]))] == ["component-name"]
    two = SLH(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
    assert [v.rule for v in validate(Network([("a", t), ("b", two)]))] == ["dim-mismatch"]
    dangling = validate(Network([("a", t)], [("a.in", "a.out")]))
    assert [v.rule for v in dangling] == ["dangling-port", "dangling-port"]
    assert dangling[0].edge == 0
    closed = validate(Network([("a", t)], [("a.out", "a.in")]))
    assert [v.rule for v in closed] == ["external-balance"]


def test_require_valid_raises():
    net = Network([("a", scalar(1, 0))], [("a.nope", "a.in")])
    with pytest.raises(NetworkError) as info:
        net.slh()
    assert info.value.violations[0].rule == "dangling-port"


def test_with_components_reorders(rng):
    net = fixtures.figure7().to_network()
    swapped = net.with_components(["B", "A"])
    assert [c.name for c in swapped.components] == ["B", "A"]
    assert swapped.in_ports[0].label.startswith("B.")
