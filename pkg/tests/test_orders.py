import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capform.exactcore import det
from capform.orders import (
    CATALOG_LEVELS,
    DualVector,
    Order,
    OrderError,
    catalog_order,
    dual,
    is_maximal,
    load_order,
    primitive_decomposition,
)
from capform.quatalg import QuatAlg

from conftest import disc


@pytest.mark.parametrize("N", CATALOG_LEVELS)
def test_catalog_orders_are_maximal(N):
    o = catalog_order(N)
    assert o.algebra.disc == N
    assert det(o.gram) == N * N
    assert is_maximal(o)[0]
    d = dual(o)
    assert d.index == N * N


def test_lipschitz_order_is_not_maximal():
    B = QuatAlg(-1, -1)
    o = Order(B, B.basis())
    ok, cert = is_maximal(o)
    assert not ok and cert["det_gram"] == 16


def test_non_orders_rejected():
    B = QuatAlg(-1, -1)
    one, i, j, k = B.basis()
    with pytest.raises(OrderError):
        Order(B, (one, i, j, i))
    with pytest.raises(OrderError):
        Order(B, (one, i.scale(Fraction(1, 2)), j, k))
    with pytest.raises(OrderError):
        Order(B, (one.scale(2), i, j, k))


def test_json_round_trip_and_file_loading(tmp_path):
    o = catalog_order(3)
    path = tmp_path / "o.json"
    path.write_text(json.dumps(o.to_json()))
    assert load_order(str(path)) == o
    assert Order.from_json(o.to_json()) == o


def test_catalog_dir_override(tmp_path, monkeypatch):
    src = catalog_order(5).to_json()
    (tmp_path / "order_5.json").write_text(json.dumps(src))
    monkeypatch.setenv("CAPFORM_CATALOG_DIR", str(tmp_path))
    assert catalog_order(5).to_json() == src
    # a tampered file fails verification
    bad = dict(src, algebra={"a": "-1", "b": "-1"})
    (tmp_path / "order_5.json").write_text(json.dumps(bad))
    with pytest.raises(OrderError):
        catalog_order(5)


@pytest.mark.parametrize("N", [2, 3, 30])
def test_dual_basis_pairs_to_identity(N):
    o = catalog_order(N)
    d = dual(o)
    for a, x in enumerate(d.basis):
        for b, y in enumerate(o.basis):
            assert (x * y.conjugate()).trace() == int(a == b)


@pytest.mark.parametrize("N", [2, 7, 30])
def test_nrd_matches_quaternion_norm(N):
    d = dual(catalog_order(N))
    for c in itertools.product(range(-2, 3), repeat=4):
        v = DualVector(c)
        assert d.nrd(v) == d.to_quat(v).nrd()
        assert d.from_quat(d.to_quat(v)) == v


def brute_short(d, bound):
    G = np.array([[float(x) for x in row] for row in d.order.gram_inv])
    lam = float(np.linalg.eigvalsh(G).min())
    R = int(math.isqrt(int(2 * bound / lam)) + 1)
    out = []
    for c in itertools.product(range(-R, R + 1), repeat=4):
        v = DualVector(c)
        if not v.is_zero() and d.nrd(v) <= bound:
            out.append(v)
    return sorted(out, key=lambda v: (d.nrd(v), v.coords))


@pytest.mark.parametrize("N,bound", [(2, 3), (3, 2), (13, 2), (30, 1)])
def test_short_vectors_against_box_enumeration(N, bound):
    d = dual(catalog_order(N))
    got = d.short_vectors(bound)
    assert [v for v, _ in got] == brute_short(d, bound)
    assert all(q == d.nrd(v) for v, q in got)


def test_short_vectors_excludes_zero_and_is_symmetric():
    d = dual(catalog_order(2))
    vs = {v for v, _ in d.short_vectors(4)}
    assert DualVector((0, 0, 0, 0)) not in vs
    assert all(-v in vs for v in vs)


@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4).filter(any), st.integers(1, 60))
def test_primitive_decomposition_reassembles(c, k):
    D = disc(30)
    beta = DualVector(tuple(c)).scale(k)
    pd = primitive_decomposition(beta, 30)
    rebuilt = pd.beta0.scale(pd.n * math.prod(p ** u for p, u in pd.u.items()))
    assert rebuilt == beta
    assert pd.beta0.content() == 1
    assert math.gcd(pd.n, 30) == 1
    assert D.dual.nrd(beta) == D.dual.nrd(pd.beta0) * (beta.content() ** 2)


def test_zero_vector_has_no_decomposition():
    with pytest.raises(ValueError):
        primitive_decomposition(DualVector((0, 0, 0, 0)), 2)


def test_divide_requires_divisibility():
    with pytest.raises(ValueError):
        DualVector((2, 4, 6, 7)).divide(2)
