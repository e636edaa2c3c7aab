import json

import numpy as np
import pytest

from clustersync import gallery, graph, specfile
from clustersync.reduce import build_quotient
from clustersync.specfile import SpecError


def base_doc(**extra):
    doc = {
        "format_version": 1,
        "gamma": 0.5,
        "clusters": [
            {"id": "A", "size": 3, "params": {"a": 0.1, "b": 0.1, "epsilon": 0.08, "I": 0.9}},
            {"id": "B", "size": 3, "params": {"a": 0.5, "b": 0.7, "epsilon": 0.08, "I": 3.0}},
        ],
        "generators": [
            {"kind": "complete", "cluster": "A", "weight": 1.0},
            {"kind": "ring", "cluster": "B", "weight": 2.0},
            {"kind": "matching", "clusters": ["A", "B"], "weight": 0.25},
        ],
    }
    doc.update(extra)
    return doc


def parse(doc):
    return specfile.parse_spec(json.dumps(doc, indent=2))


def test_generators_expand_in_order():
    doc = base_doc(edges=[[0, 5, 0.1]])
    net = specfile.build_network(parse(doc))
    expected = (graph.complete_edges([0, 1, 2], 1.0) + graph.ring_edges([3, 4, 5], 2.0)
                + graph.matching_edges([0, 1, 2], [3, 4, 5], 0.25) + [(0, 5, 0.1)])
    assert specfile.expand_edges(parse(doc)) == expected
    assert net.n_nodes == 6 and net.diffusion == (0.5, 0.0)
    assert net.cluster_names == ("A", "B")


def test_star_generator_center():
    doc = base_doc(generators=[{"kind": "star", "cluster": "B", "weight": 0.04, "center": 2}])
    edges = specfile.expand_edges(parse(doc))
    assert all(5 in e[:2] for e in edges) and len(edges) == 2
    bad = base_doc(generators=[{"kind": "star", "cluster": "B", "weight": 0.04, "center": 3}])
    with pytest.raises(SpecError, match="center"):
        specfile.build_network(parse(bad))


@pytest.mark.parametrize("name", sorted(gallery.GALLERY))
def test_round_trip_is_hash_equal(name):
    doc = gallery.spec(name)
    net = specfile.build_network(doc)
    text = specfile.dump_document(specfile.network_to_document(net, doc.name))
    again = specfile.build_network(specfile.parse_spec(text))
    assert again == net and again.digest() == net.digest()


def test_expansion_is_deterministic():
    a = specfile.build_network(gallery.spec("complete-star"))
    b = specfile.build_network(gallery.spec("complete-star"))
    assert a.digest() == b.digest()


def test_quotient_document_round_trip():
    q = build_quotient(specfile.build_network(gallery.spec("asymmetric")))
    doc = specfile.parse_spec(specfile.dump_document(specfile.quotient_to_document(q, "q")))
    assert specfile.is_quotient(doc)
    assert specfile.build_quotient_from_spec(doc) == q
    with pytest.raises(SpecError, match="quotient"):
        specfile.build_network(doc)


@pytest.mark.parametrize(
    "mutate,match",
    [
        (lambda d: d.update(colour="red"), "colour"),
        (lambda d: d["clusters"][0].update(shape="round"), "clusters.0.shape"),
        (lambda d: d["clusters"][0]["params"].pop("epsilon"), "epsilon"),
        (lambda d: d["clusters"][0]["params"].update(b=-1.0), "b"),
        (lambda d: d["clusters"][0].update(model="hodgkin-huxley"), "model"),
        (lambda d: d.update(format_version=2), "format_version"),
        (lambda d: d["clusters"][1].update(id="A"), "unique"),
        (lambda d: d["generators"].append({"kind": "ring", "cluster": "Z", "weight": 1.0}), "unknown cluster"),
        (lambda d: d["generators"].append({"kind": "matching", "cluster": "A", "weight": 1.0}), "clusters"),
        (lambda d: d["clusters"][0].update(nodes=[0, 1, 2]), "exactly one"),
        (lambda d: d.update(simulation={"t_end": 10, "ic": {"mode": "random"}}), "seed"),
        (lambda d: d.update(gamma=-1), "gamma"),
    ],
)
def test_strict_validation(mutate, match):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(SpecError, match=match):
        parse(doc)


def test_json_errors_report_line_and_column():
    with pytest.raises(SpecError, match=r"spec.json:3:12: invalid JSON"):
        specfile.parse_spec('{\n  "format_version": 1,\n  "gamma": ,\n}', source="spec.json")


def test_network_errors_become_spec_errors():
    doc = base_doc(edges=[[0, 1, 1.0]])  # duplicates the complete generator
    with pytest.raises(SpecError, match="duplicate edge"):
        specfile.build_network(parse(doc))


def test_initial_conditions():
    doc = base_doc(simulation={"t_end": 1, "ic": {"mode": "random", "seed": 4, "box": [-1, 1]}})
    d = parse(doc)
    net = specfile.build_network(d)
    x0, seed = specfile.initial_state(d, net)
    assert seed == 4 and x0.shape == (12,) and np.all(np.abs(x0) <= 1)
    x1, seed = specfile.initial_state(d, net, seed=5)
    assert seed == 5 and not np.array_equal(x0, x1)

    doc["simulation"]["ic"] = {"mode": "cluster_values", "values": [[1, 2], [3, 4]]}
    d = parse(doc)
    x0, _ = specfile.initial_state(d, net)
    assert np.array_equal(x0.reshape(6, 2)[3:], [[3, 4]] * 3)

    doc["simulation"]["ic"] = {"mode": "explicit", "values": [[1, 2]] * 5}
    with pytest.raises(SpecError, match="explicit"):
        specfile.initial_state(parse(doc), net)


def test_explicit_nodes():
    doc = base_doc(generators=[], edges=[[0, 1, 1.0], [1, 2, 1.0]])
    doc["clusters"] = [
        {"id": "A", "nodes": [2, 0], "params": {"a": 0.1, "b": 0.1, "epsilon": 0.08, "I": 0.9}},
        {"id": "B", "nodes": [1], "params": {"a": 0.1, "b": 0.1, "epsilon": 0.08, "I": 0.9}},
    ]
    net = specfile.build_network(parse(doc))
    assert net.clusters == ((2, 0), (1,))
