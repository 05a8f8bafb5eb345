import math

import pytest

import vlir


def test_distribution_basics_and_entropy():
    d = vlir.Distribution(K=2, atoms={"a": 0.7, "b": 0.3})
    assert d.K == 2
    assert len(d) == 2
    assert d.min_prob == pytest.approx(0.3, abs=1e-15)
    assert d.atoms() == {"a": 0.7, "b": 0.3}
    assert vlir.entropy(d) == pytest.approx(0.8812908992306927, abs=1e-12)
    assert vlir.self_information(d, "b") == pytest.approx(math.log2(1 / 0.3), abs=1e-12)

    u = vlir.Distribution(K=2, atoms={"a": 0.5, "b": 0.5})
    assert vlir.variational_distance(d, u) == pytest.approx(0.2, abs=1e-15)

    with pytest.raises(ValueError):
        vlir.Distribution(K=2, atoms={"a": 0.6, "b": 0.6})
    with pytest.raises(ValueError):
        vlir.Distribution(K=1, atoms={"a": 1.0})


def test_scalar_quantities_and_witnesses():
    fair = vlir.Distribution(K=2, atoms={"a": 0.5, "b": 0.5})
    up = vlir.g_upper(fair, 0.25)
    assert up["value"] == pytest.approx(1.5, abs=1e-12)
    assert up["method"] == "closed_form"
    assert up["witness_reduce_smallest"] == pytest.approx(0.25, abs=1e-15)

    w = vlir.g_upper_witness(fair, 0.25)
    assert w.deficiency == pytest.approx(0.25, abs=1e-15)
    assert w.values()["a"] == pytest.approx(0.25, abs=1e-15)  # smallest id on ties

    heavy_tail = vlir.Distribution(K=2, atoms={"a": 0.1, "b": 0.3, "c": 0.6})
    assert math.isinf(vlir.g_upper(heavy_tail, 0.2)["value"])
    oracle = vlir.g_upper_vertex_oracle(heavy_tail, 0.2)
    assert math.isinf(oracle["value"])
    assert oracle["probe_objectives"] == sorted(oracle["probe_objectives"])

    skewed = vlir.Distribution(K=2, atoms={"a": 0.25, "b": 0.25, "c": 0.5})
    low = vlir.g_lower(skewed, 0.25)
    assert low["value"] == pytest.approx(0.6887218755408672, abs=1e-12)
    assert low["value"] == pytest.approx(vlir.g_lower_bruteforce(skewed, 0.25), abs=1e-9)
    assert vlir.g_lower(skewed, 0.0)["value"] == pytest.approx(vlir.entropy(skewed), abs=1e-12)


def test_block_spectrum_and_quantile():
    src = vlir.Source.iid(vlir.Distribution(K=2, atoms={"0": 0.75, "1": 0.25}))
    spec = vlir.block_spectrum(src, 2)
    assert spec.entries() == [(0.0625, 1.0), (0.1875, 2.0), (0.5625, 1.0)]
    assert spec.total_mass == pytest.approx(1.0, abs=1e-15)
    assert vlir.h_quantile(spec, 0.5, 2) == pytest.approx(math.log2(1 / 0.5625) / 2, abs=1e-12)

    block = vlir.block_distribution(src, 3)
    assert len(block) == 8
    assert vlir.entropy(block) == pytest.approx(3 * vlir.entropy(src_letter()), abs=1e-12)


def src_letter():
    return vlir.Distribution(K=2, atoms={"0": 0.75, "1": 0.25})


def test_maps_and_average_distance():
    d = vlir.Distribution(K=2, atoms={"h": 0.5, "t": 0.5})
    collide = vlir.Map(K=2, assign={"h": (1, 0), "t": (1, 0)})
    assert vlir.mean_length(collide, d) == pytest.approx(1.0, abs=1e-15)
    assert vlir.avg_variational_distance(collide, d) == pytest.approx(0.5, abs=1e-15)
    ident = vlir.Map(K=2, assign={"h": (1, 0), "t": (1, 1)})
    assert vlir.avg_variational_distance(ident, d) == 0.0
    assert vlir.per_class_sup_distance(ident, d) == 0.0
    assert ident.assignments() == {"h": (1, 0), "t": (1, 1)}


def test_map_enumeration_and_converse():
    assert len(vlir.enumerate_maps(["a"], 1, 2)) == 2
    assert len(vlir.enumerate_maps(["a", "b"], 1, 2)) == 5
    maps = vlir.enumerate_maps(["a", "b"], 3, 2)
    assert len(maps) == 19

    d = vlir.Distribution(K=2, atoms={"a": 0.6, "b": 0.4})
    rep = vlir.converse_check(d, 0.25, maps)
    assert rep["agreed"]
    assert not rep["vacuous"]
    assert rep["trials"] == 19

    sampled = vlir.sample_random_maps(d, 3, 25, 7)
    again = vlir.sample_random_maps(d, 3, 25, 7)
    assert [m.assignments() for m in sampled] == [m.assignments() for m in again]

    with pytest.raises(RuntimeError):
        vlir.enumerate_maps(["a", "b", "c", "d", "e", "f"], 3, 2)


def test_construction_roundtrip():
    src = vlir.Source.iid(vlir.Distribution(K=2, atoms={"0": 0.7, "1": 0.3}))
    block = vlir.block_distribution(src, 8)
    q = vlir.g_upper_witness(block, 1e-5)
    built = vlir.direct_construct(block, q, 0.25, 8)
    m, g = built["map"], built["guarantees"]
    assert len(m) == 256
    assert vlir.avg_variational_distance(m, block) <= g["distance_bound"] + 1e-12
    assert vlir.mean_length(m, block) >= g["length_bound"] - 1e-12
    assert g["tau"] == pytest.approx(1e-5, abs=1e-15)


def test_witness_and_rate_sequence():
    d = vlir.Distribution(K=2, atoms={"a": 0.5, "b": 0.25, "c": 0.125, "d": 0.125})
    w = vlir.rate_floor_witness(d, 0.2, 0.1, 0.25, 1)
    assert w["q_bar"].deficiency == pytest.approx(0.3, abs=1e-12)
    assert w["small_set_mass"] <= 0.3 + 1e-12
    base = w["q_bar"].values()
    for atom, p in d.atoms().items():
        assert 0.0 < base[atom] <= p + 1e-15

    rates = vlir.rate_sequence(vlir.Source.iid(d), 0.0, 0.0, [1, 2, 3], "g_upper")
    h = vlir.entropy(d)
    assert [n for n, _ in rates] == [1, 2, 3]
    for _, v in rates:
        assert v == pytest.approx(h, abs=1e-9)
