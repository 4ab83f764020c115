"""Reduction of outcome configurations to domain-level graphs."""

import numpy as np
import pytest

from akltsim.config_model import FilterConfiguration
from akltsim.domain_reduction import StochasticGraph, domain_sizes, reduce_configuration
from akltsim.lattice import build

from oracles import (
    brute_domains,
    brute_parity_edges,
    brute_wrap_by_tiling,
    brute_wraps,
    random_labels,
)


def _reduce(lat, labels):
    return reduce_configuration(FilterConfiguration(lat, np.asarray(labels, dtype=np.int8)))


def _by_members(graph):
    """Vertex data keyed by frozen member sets, independent of ordering."""
    out = {}
    for i in range(graph.n_vertices):
        key = frozenset(int(s) for s in graph.members[i])
        out[key] = (
            int(graph.vertex_labels[i]),
            int(graph.vertex_sizes[i]),
            bool(graph.vertex_wraps[i, 0]),
            bool(graph.vertex_wraps[i, 1]),
        )
    return out


@pytest.mark.parametrize("nu,nv", [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 4)])
def test_vertices_match_brute_force(nu, nv):
    lat = build(nu, nv)
    rng = np.random.default_rng(2000 + 10 * nu + nv)
    for _ in range(20):
        labels = random_labels(lat, rng)
        graph = _reduce(lat, labels)
        data = _by_members(graph)
        domains = brute_domains(lat, labels)
        wraps = brute_wraps(lat, labels)
        assert len(data) == len(domains) == graph.n_vertices
        for dom, (wu, wv) in zip(domains, wraps):
            key = frozenset(dom)
            label, size, gu, gv = data[key]
            assert label == labels[dom[0]]
            assert size == len(dom)
            assert (gu, gv) == (wu, wv)


@pytest.mark.parametrize("nu,nv", [(1, 1), (2, 2), (3, 3), (4, 4)])
def test_edges_are_odd_multiplicity_pairs(nu, nv):
    lat = build(nu, nv)
    rng = np.random.default_rng(3000 + 10 * nu + nv)
    for _ in range(20):
        labels = random_labels(lat, rng)
        graph = _reduce(lat, labels)
        member_keys = [frozenset(int(s) for s in m) for m in graph.members]
        got = {
            frozenset((member_keys[p], member_keys[q]))
            for p, q in graph.edges
        }
        domains = brute_domains(lat, labels)
        expected = {
            frozenset((frozenset(domains[i]), frozenset(domains[j])))
            for i, j in brute_parity_edges(lat, labels)
        }
        assert got == expected
        assert graph.n_edges == len(expected)


def test_wraps_cross_checked_by_tiling():
    lat = build(3, 3)
    rng = np.random.default_rng(11)
    for _ in range(12):
        labels = random_labels(lat, rng, p_z=0.15)
        graph = _reduce(lat, labels)
        data = _by_members(graph)
        for dom in brute_domains(lat, labels):
            key = frozenset(dom)
            _, _, gu, gv = data[key]
            assert gu == brute_wrap_by_tiling(lat, labels, dom, axis=0)
            assert gv == brute_wrap_by_tiling(lat, labels, dom, axis=1)


def test_uniform_configuration_wraps():
    lat = build(3, 3)
    graph = _reduce(lat, np.zeros(lat.n_sites, dtype=np.int8))
    assert graph.n_vertices == 1
    assert graph.n_edges == 0
    assert graph.vertex_sizes[0] == lat.n_sites
    assert bool(graph.vertex_wraps[0, 0]) and bool(graph.vertex_wraps[0, 1])


def test_minimal_torus_parallel_bonds():
    # two sites with different labels: three parallel bonds, odd multiplicity
    lat = build(1, 1)
    graph = _reduce(lat, [0, 1])
    assert graph.n_vertices == 2
    assert graph.n_edges == 1
    assert graph.relations.shape[0] == 3
    # same labels: a single two-site domain wrapping both directions
    graph = _reduce(lat, [1, 1])
    assert graph.n_vertices == 1
    assert bool(graph.vertex_wraps[0, 0]) and bool(graph.vertex_wraps[0, 1])


def test_checkerboard():
    # alternating labels on the bipartition: every site is its own domain
    lat = build(2, 2)
    labels = np.array([0, 1] * 4, dtype=np.int8)
    graph = _reduce(lat, labels)
    assert graph.n_vertices == 8
    assert np.all(graph.vertex_sizes == 1)
    assert graph.n_edges == 12
    assert not graph.vertex_wraps.any()


def test_sizes_and_dict():
    lat = build(2, 2)
    rng = np.random.default_rng(5)
    labels = random_labels(lat, rng)
    graph = _reduce(lat, labels)
    sizes = domain_sizes(graph)
    assert sizes.sum() == lat.n_sites
    d = graph.as_dict()
    assert d["n_vertices"] == graph.n_vertices
    assert len(d["vertices"]) == graph.n_vertices
    assert len(d["edges"]) == graph.n_edges
    assert isinstance(graph, StochasticGraph)


def test_members_partition_sites():
    lat = build(3, 2)
    rng = np.random.default_rng(6)
    for _ in range(10):
        labels = random_labels(lat, rng)
        graph = _reduce(lat, labels)
        seen = sorted(int(s) for m in graph.members for s in m)
        assert seen == list(range(lat.n_sites))
        for i, members in enumerate(graph.members):
            assert np.all(labels[members] == graph.vertex_labels[i])
