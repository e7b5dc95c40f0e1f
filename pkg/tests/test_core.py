import pytest

from aqtwireless.core import (
    Network,
    ParseError,
    Path,
    line_network,
    max_degree,
    read_network,
    star_network,
    validate_path,
    write_network,
)


def test_line_path_is_valid():
    net = line_network(3, max_path_hops=2)
    assert validate_path(net, Path.from_nodes([0, 1, 2]))


def test_repeated_link_rejected():
    net = line_network(3, max_path_hops=2)
    verdict = validate_path(net, Path(((0, 1), (0, 1))))
    assert not verdict
    assert verdict.index == 1


def test_broken_chain_rejected():
    net = Network.from_edges(3, [(0, 1), (1, 2), (0, 2)], 2)
    verdict = validate_path(net, Path(((0, 1), (2, 0))))
    assert not verdict
    assert verdict.index == 1
    assert "chain" in verdict.reason


def test_path_longer_than_d_rejected():
    net = line_network(4, max_path_hops=2)
    verdict = validate_path(net, Path.from_nodes([0, 1, 2, 3]))
    assert not verdict and verdict.index == 2


def test_non_edge_and_empty_path():
    net = line_network(3, max_path_hops=2)
    assert validate_path(net, Path.from_nodes([0, 2])).index == 0
    assert not validate_path(net, Path(()))


def test_revisiting_a_node_through_new_links_is_allowed():
    net = Network.from_edges(3, [(0, 1), (1, 2), (0, 2)], 3)
    assert validate_path(net, Path.from_nodes([0, 1, 2, 0]))


@pytest.mark.parametrize("net, expected", [
    (star_network(4), 4),
    (line_network(3), 2),
    (Network.from_edges(1, [], 1), 0),
])
def test_max_degree(net, expected):
    assert max_degree(net) == expected


def test_adjacency_must_be_symmetric_and_irreflexive():
    with pytest.raises(ValueError):
        Network(2, (frozenset({1}), frozenset()), 1)
    with pytest.raises(ValueError):
        Network.from_edges(2, [(0, 0)], 1)


def test_oriented_network_limits_links():
    net = line_network(3, oriented=True)
    assert net.links() == [(0, 1), (1, 2)]
    assert not net.has_link(1, 0)
    assert net.neighbors[1] == {0, 2}


def test_network_round_trip():
    net = Network.from_edges(4, [(0, 1), (1, 2), (2, 3)], 3, arcs=[(0, 1), (2, 1)])
    again = read_network(write_network(net))
    assert again == net


def test_network_text_format():
    net = read_network("# tiny\nnodes 3\nedge 0 1\nedge 1 2\n")
    assert net.num_nodes == 3 and net.edges == [(0, 1), (1, 2)]


def test_network_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        read_network("nodes 2\nedge 0 5\n")
    assert err.value.lineno == 2
    with pytest.raises(ParseError):
        read_network("edge 0 1\n")


def test_path_nodes_and_length():
    p = Path.from_nodes([3, 1, 2])
    assert p.length == 2 and p.nodes() == [3, 1, 2]
