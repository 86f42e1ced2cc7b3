import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groupoid_l2.betti import (
    NotSubcomplexError, betti_all, betti_complex, betti_groupoid, betti_via_exhaustion,
    boundary_dimension, cycle_dimension, eg_truncation, euler, fiber_laplacians,
    is_subcomplex, laplacian, morse_check, nabla,
)
from groupoid_l2.complexes import alpha, build_graphing_complex, is_tree_fibered
from groupoid_l2.document import random_groupoid
from groupoid_l2.fixtures import r2, r3, sigma, sigma2, triv2, z2pt
from groupoid_l2.groupoid import one_sheeted_decomposition
from groupoid_l2.linalg import rank
from conftest import random_graphing
from oracles import closed_form_beta0

HALF, THIRD = Fraction(1, 2), Fraction(1, 3)
seeds = st.integers(min_value=0, max_value=10 ** 6)


def rand_complex(seed):
    G = random_groupoid(seed, 1 + seed % 4, 1 + seed % 2, 24)
    return G, build_graphing_complex(G, random_graphing(G, random.Random(seed)).members)


class TestLaplacian:
    def test_triv2_zero(self):
        K = build_graphing_complex(triv2(), [])
        L = laplacian(K, 0)
        assert L.shape == (2, 2) and rank(L.matrix) == 0

    def test_r2_level0(self):
        L = laplacian(build_graphing_complex(r2(), [{"f"}]), 0)
        assert rank(L.matrix) == 2
        assert sorted(map(sum, L.matrix)) == [0, 0, 0, 0]

    def test_self_adjoint_psd(self):
        for seed in range(15):
            _, K = rand_complex(seed)
            for n in range(K.top + 1):
                L = laplacian(K, n)
                assert L.adjoint() == L
                if L.matrix:
                    w = np.sqrt([float(c) for c in L.domain_weights])
                    M = np.array(L.to_float()) * w[:, None] / w[None, :]
                    assert np.linalg.eigvalsh((M + M.T) / 2).min() > -1e-9

    def test_fibers_block(self):
        K = build_graphing_complex(r3(), [sigma(), sigma2()])
        blocks = fiber_laplacians(K, 0)
        assert sum(rank(b.matrix) for b in blocks.values()) == rank(laplacian(K, 0).matrix)


class TestBettiExamples:
    @pytest.mark.parametrize("G,gr,expected", [
        (r2, [{"f"}], (HALF, 0)),
        (z2pt, [{"a"}], (HALF, 0)),
        (r3, [sigma(), sigma2()], (THIRD, THIRD)),
        (triv2, [], (1, 0)),
    ])
    def test_values(self, G, gr, expected):
        K = build_graphing_complex(G(), gr)
        assert tuple(betti_all(K).values.values()) == expected

    def test_boundary_dimensions(self):
        K = build_graphing_complex(r3(), [sigma(), sigma2()])
        assert boundary_dimension(K, 1) == Fraction(2, 3)
        assert boundary_dimension(K, 2) == 0 and boundary_dimension(K, 0) == 0

    def test_out_of_range(self):
        assert betti_complex(build_graphing_complex(r2(), [{"f"}]), 5) == 0

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_hodge(self, seed):
        _, K = rand_complex(seed)
        for n in range(K.top + 1):
            assert betti_complex(K, n) == cycle_dimension(K, n) - boundary_dimension(K, n + 1)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_beta0_complex_independent(self, seed):
        G = random_groupoid(seed, 1 + seed % 4, 1 + seed % 2, 24)
        all_arrows = build_graphing_complex(G, [set(G.non_units)])
        pieces = build_graphing_complex(G, [p - set(G.unit_arrows)
                                            for p in one_sheeted_decomposition(G)])
        assert betti_complex(all_arrows, 0) == betti_complex(pieces, 0) == closed_form_beta0(G)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_tree_fibred_beta1_zero(self, seed):
        _, K = rand_complex(seed)
        if is_tree_fibered(K):
            assert betti_complex(K, 1) == 0


class TestEulerMorse:
    def test_r2(self):
        K = build_graphing_complex(r2(), [{"f"}])
        e = euler(K)
        assert e.chi == e.chi2 == HALF
        m = morse_check(K, 0)
        assert (m.alpha_side, m.beta_side, m.gap, m.next_boundary) == (1, HALF, HALF, HALF)
        assert m.holds and not m.stated_sign_holds

    def test_z2pt_gap(self):
        m = morse_check(build_graphing_complex(z2pt(), [{"a"}]), 0)
        assert m.gap == HALF == m.next_boundary

    def test_r3(self):
        K = build_graphing_complex(r3(), [sigma(), sigma2()])
        assert euler(K).chi == 0
        assert morse_check(K, 0).gap == Fraction(2, 3)
        assert morse_check(K, 1).gap == 0

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_gap_independent_route(self, seed):
        _, K = rand_complex(seed)
        assert euler(K).equal
        for n in range(K.top + 1):
            m = morse_check(K, n)
            assert m.holds
            if n + 1 <= K.top:
                # b_{n+1} = dim C_{n+1} - dim ker d_{n+1}
                assert m.gap == alpha(K, n + 1).value - cycle_dimension(K, n + 1)


class TestTruncation:
    def test_r2(self):
        assert [len(l) for l in eg_truncation(r2(), 1, 1).levels] == [4]
        K = eg_truncation(r2(), 1, 2)
        assert [len(l) for l in K.levels] == [4, 4]
        assert betti_all(K).values == {0: HALF, 1: 0}

    def test_r3_fills(self):
        K2, K3 = eg_truncation(r3(), 1, 2), eg_truncation(r3(), 1, 3)
        assert [len(l) for l in K3.levels] == [9, 18, 18]
        assert betti_all(K2).values == {0: THIRD, 1: THIRD}
        assert betti_all(K3).values == {0: THIRD, 1: 0, 2: 0}
        assert nabla(K2, K3, 1) == 0 and nabla(K2, K2, 1) == THIRD

    def test_z2pt(self):
        K = eg_truncation(z2pt(), 1, 2)
        assert set(K.levels[1]) == {(("a", 1), ("e", 1)), (("e", 1), ("a", 1))}
        assert betti_all(K).values == {0: HALF, 1: 0}

    def test_step2_bound_reported(self):
        assert eg_truncation(r2(), 1, 3).step2.holds
        rep = eg_truncation(r2(), 2, 1).step2
        assert (rep.bound, rep.worst, rep.holds) == (1, 2, False)

    def test_valid_complexes(self):
        from groupoid_l2.complexes import validate_complex
        for G in (r2(), r3(), z2pt()):
            for N in (1, 2):
                assert validate_complex(eg_truncation(G, N, 3)).valid


class TestExhaustion:
    def test_r2_table(self):
        chain = [eg_truncation(r2(), 1, k) for k in (1, 2, 3)]
        t = betti_via_exhaustion(chain, 0)
        assert t.table == {(0, 0): 1, (0, 1): HALF, (0, 2): HALF,
                           (1, 1): HALF, (1, 2): HALF, (2, 2): HALF}
        assert t.limit == HALF and t.monotone

    def test_r3_level1(self):
        chain = [eg_truncation(r3(), 1, k) for k in (1, 2, 3)]
        t = betti_via_exhaustion(chain, 1)
        assert t.table[(1, 1)] == THIRD and t.table[(1, 2)] == 0 and t.limit == 0
        assert t.monotone

    def test_not_nested(self):
        a, b = eg_truncation(r3(), 1, 3), eg_truncation(r3(), 1, 2)
        assert not is_subcomplex(a, b)
        with pytest.raises(NotSubcomplexError):
            nabla(a, b, 0)
        with pytest.raises(NotSubcomplexError):
            betti_via_exhaustion([a, b], 0)


class TestGroupoidBetti:
    def test_examples(self):
        assert betti_groupoid(r2()).beta0 == HALF
        b = betti_groupoid(r3())
        assert b.beta0 == THIRD and b.beta1_upper == 0 and b.exact1
        b = betti_groupoid(z2pt())
        assert b.beta0 == HALF and b.beta1_upper == 0
        assert betti_groupoid(triv2()).beta0 == 1

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_beta0_closed_form(self, seed):
        G = random_groupoid(seed, 1 + seed % 4, 1 + seed % 3, 24)
        assert betti_groupoid(G).beta0 == closed_form_beta0(G)
