import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghspace.errors import (
    BudgetExceeded,
    CardinalityMismatch,
    EmptySubset,
    IndexOutOfRange,
    NotACorrespondence,
    NotIsometricEmbedding,
)
from ghspace.gh import (
    Correspondence,
    best_permutation,
    distortion,
    gh_exact,
    gh_local,
    gh_lower_bounds,
    gh_upper_permutation,
    glue,
    hausdorff,
    lower_bound_terms,
)
from ghspace.metric import DistanceMatrix, validate

import oracles

P1 = DistanceMatrix([[0, 1], [1, 0]])
P3 = DistanceMatrix([[0, 3], [3, 0]])
LINE013 = DistanceMatrix(oracles.line([0, 1, 3]))


def rand_space(seed, n, low=1.0, high=2.0):
    return DistanceMatrix(oracles.random_metric(np.random.default_rng(seed), n, low, high))


# -- correspondences ----------------------------------------------------------

def test_distortion_examples():
    assert distortion(Correspondence.identity(3), LINE013, LINE013) == 0
    assert distortion(Correspondence.full(2, 2), P1, P3) == 3
    assert distortion(Correspondence([(0, 0), (1, 1)]), P1, P3) == 2


def test_correspondence_must_be_surjective():
    with pytest.raises(NotACorrespondence):
        distortion(Correspondence([(0, 0)]), P1, P3)
    with pytest.raises(IndexOutOfRange):
        distortion(Correspondence([(0, 0), (1, 1), (2, 1)]), P1, P3)


def test_removing_pairs_never_increases_distortion():
    X, Y = rand_space(1, 4), rand_space(2, 3)
    full = Correspondence.full(4, 3)
    sub = Correspondence.from_maps([0, 1, 2, 2], [0, 1, 3])
    assert distortion(sub, X, Y) <= distortion(full, X, Y)


# -- exact distance -----------------------------------------------------------

def test_gh_examples():
    r = gh_exact(LINE013, LINE013)
    assert r.exact and r.value == 0 and r.witness == Correspondence.identity(3)
    assert gh_exact(DistanceMatrix([[0]]), DistanceMatrix([[0, 2], [2, 0]])).value == 1
    assert gh_exact(P1, P3).value == 1


def test_gh_two_point_matches_all_seven_correspondences():
    assert oracles.gh_all_relations(P1.d, P3.d) == gh_exact(P1, P3).value


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_gh_matches_enumeration(n, m, seed):
    X, Y = rand_space(seed, n), rand_space(seed + 1, m, 0.5, 3.0)
    r = gh_exact(X, Y)
    assert r.exact
    assert r.value == oracles.gh_graph_pairs(X.d, Y.d)
    assert r.upper == 0.5 * distortion(r.witness, X, Y)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_graph_restriction_is_lossless(n, m, seed):
    X, Y = rand_space(seed, n, 0.5, 2.0), rand_space(seed + 7, m, 0.5, 2.0)
    assert oracles.gh_all_relations(X.d, Y.d) == gh_exact(X, Y).value


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_bounds_sandwich_exact(n, m, seed):
    X, Y = rand_space(seed, n, 0.2, 3.0), rand_space(seed + 3, m, 0.2, 3.0)
    r = gh_exact(X, Y)
    assert gh_lower_bounds(X, Y) <= r.lower
    full = 0.5 * distortion(Correspondence.full(n, m), X, Y)
    assert r.upper <= full <= 0.5 * max(X.d.max(), Y.d.max())
    if n == m:
        assert gh_upper_permutation(X, Y) >= r.upper


def test_order_statistics_bound_with_unequal_sizes_stays_valid():
    # sorted distances truncated to a common length would claim ~0.5 here
    X = DistanceMatrix(oracles.line([0, 1]))
    Y = DistanceMatrix(oracles.line([0, 0.001, 1.001]))
    r = gh_exact(X, Y)
    assert gh_lower_bounds(X, Y) <= r.value
    assert r.value == pytest.approx(0.0005)
    assert "order_statistics" not in lower_bound_terms(X, Y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.randoms(use_true_random=False))
def test_zero_iff_relabelling(n, seed, rnd):
    X = rand_space(seed, n)
    perm = list(range(n))
    rnd.shuffle(perm)
    assert gh_exact(X, X.permuted(perm)).value == 0
    Y = rand_space(seed + 1, n)
    assert (gh_exact(X, Y).value == 0) == (gh_upper_permutation(X, Y) == 0)


def test_deterministic_and_relabel_invariant_value():
    X, Y = rand_space(5, 6), rand_space(6, 5)
    a, b = gh_exact(X, Y), gh_exact(X, Y)
    assert a == b
    assert gh_exact(X.permuted([5, 4, 3, 2, 1, 0]), Y).value == a.value


def test_budget_gives_certified_interval():
    X, Y = rand_space(11, 9, 0.1, 2.0), rand_space(12, 9, 0.1, 2.0)
    full = gh_exact(X, Y)
    cut = gh_exact(X, Y, budget=3)
    assert not cut.exact
    assert cut.lower <= full.value <= cut.upper
    assert cut.upper == 0.5 * distortion(cut.witness, X, Y)
    with pytest.raises(BudgetExceeded) as e:
        gh_exact(X, Y, budget=3, raise_on_budget=True)
    assert e.value.result == cut


def test_symmetry_and_triangle_on_triples():
    rng = np.random.default_rng(3)
    for _ in range(20):
        X, Y, Z = (DistanceMatrix(oracles.random_metric(rng, int(rng.integers(1, 5)), 0.3, 2.0)) for _ in range(3))
        xy, yz, xz = gh_exact(X, Y).value, gh_exact(Y, Z).value, gh_exact(X, Z).value
        assert xy == gh_exact(Y, X).value
        assert xz <= xy + yz + 1e-9


# -- permutation bound and local formula --------------------------------------

def test_permutation_examples():
    X = rand_space(4, 5)
    assert gh_upper_permutation(X, X.permuted([2, 0, 4, 1, 3])) == 0
    assert gh_upper_permutation(P1, P3) == 1
    with pytest.raises(CardinalityMismatch):
        gh_upper_permutation(P1, LINE013)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_permutation_matches_enumeration_with_lex_first_witness(n, seed):
    X, Y = rand_space(seed, n), rand_space(seed + 9, n)
    pb = best_permutation(X, Y)
    want = oracles.permutation_norm(X.d, Y.d)
    assert pb.norm == want
    first = next(
        p for p in itertools.permutations(range(n))
        if float(np.abs(X.d - Y.d[np.ix_(p, p)]).max()) == want
    )
    assert pb.permutation == first


def test_gh_local_examples():
    r = gh_local(LINE013, LINE013)
    assert r.exact and r.value == 0
    assert gh_local(P1, P3) is None
    with pytest.raises(CardinalityMismatch):
        gh_local(P1, LINE013)


def test_gh_local_on_perturbed_line():
    noise = np.array([[0, 0.05, -0.03], [0.05, 0, -0.05], [-0.03, -0.05, 0]])
    Y = validate(LINE013.d + noise)
    r = gh_local(LINE013, Y)
    assert r is not None and r.exact
    assert r.value == pytest.approx(0.025)
    assert r.value == gh_exact(LINE013, Y).value


# -- Hausdorff and gluing -----------------------------------------------------

def test_hausdorff_examples():
    assert hausdorff(LINE013, [0, 1], [1, 0]) == 0
    assert hausdorff(LINE013, [0], [2]) == 3
    assert hausdorff(LINE013, [0, 1], [1, 2]) == 2
    with pytest.raises(EmptySubset):
        hausdorff(LINE013, [], [1])
    with pytest.raises(IndexOutOfRange):
        hausdorff(LINE013, [0], [3])


def test_glue_copy_with_itself():
    g = glue(LINE013, [(LINE013, [0, 1, 2]), (LINE013, [0, 1, 2])])
    assert g.matrix == LINE013
    assert g.part_maps[0].tolist() == g.part_maps[1].tolist() == [0, 1, 2]


def test_glue_two_segments_at_a_point():
    pt = DistanceMatrix([[0]])
    g = glue(pt, [(DistanceMatrix(oracles.line([0, 1])), [0]), (DistanceMatrix(oracles.line([0, 2])), [0])])
    assert g.matrix.n == 3
    assert sorted(g.matrix.d[np.triu_indices(3, 1)].tolist()) == [1, 2, 3]
    assert oracles.triangle_violations(g.matrix.d.tolist()) == []


def test_glue_rejects_non_isometric_embedding():
    with pytest.raises(NotIsometricEmbedding) as e:
        glue(P1, [(LINE013, [0, 2])])
    assert (e.value.part, e.value.y1, e.value.y2) == (0, 0, 1)


def random_glue_instance(rng):
    """Parts built as random spaces that contain an exact copy of ``Y``."""
    k = int(rng.integers(1, 4))
    Y = DistanceMatrix(oracles.random_metric(rng, k, 1.0, 2.0))
    parts = []
    for _ in range(int(rng.integers(1, 4))):
        extra = int(rng.integers(0, 3))
        n = k + extra
        d = np.zeros((n, n))
        d[:k, :k] = Y.d
        # extra points: within [1, 2] of everything keeps the triangle inequality
        for i in range(k, n):
            for j in range(i):
                d[i, j] = d[j, i] = rng.uniform(1.0, 2.0)
        perm = rng.permutation(n)
        inv = np.argsort(perm)
        Xp = DistanceMatrix(d[np.ix_(perm, perm)])
        parts.append((Xp, inv[:k].tolist()))
    return Y, parts


def test_glue_random_instances_are_metric_and_isometric():
    rng = np.random.default_rng(0)
    for _ in range(50):
        Y, parts = random_glue_instance(rng)
        g = glue(Y, parts)
        validate(g.matrix.d)
        for (Xp, emb), pm in zip(parts, g.part_maps):
            assert np.allclose(g.matrix.d[np.ix_(pm, pm)], Xp.d, atol=1e-12)
            assert g.y_map.tolist() == pm[emb].tolist()
