import itertools
import random
from fractions import Fraction

import pytest

from oracles import enumerate_subspace_signs, lp_concordant

from injcheck.classes import (
    Interval,
    Scaled,
    SignPattern,
    SignSets,
    parse_interval_box_text,
    parse_signsets_text,
)
from injcheck.limits import Caps, CapExceeded
from injcheck.linalg import RationalMatrix, Subspace
from injcheck.signroute import (
    concordant_pair,
    interval_kernel_feasible,
    interval_member_through,
    kernel_sign_vectors,
    pair_sign_feasible,
    realize_sign_in_subspace,
    sign_route,
    signset_member_rows,
    subspace_sign_vectors,
)
from injcheck.signs import ALL_SIGN_SETS, SignVector, all_sign_vectors, sigma

F = Fraction


def M(*rows):
    return RationalMatrix.from_rows(rows)


def sv(*entries):
    return SignVector(tuple(entries))


class TestSubspaceSignVectors:
    def test_full_space_is_every_nonzero_vector(self):
        got = subspace_sign_vectors(Subspace.full(2))
        assert len(got) == 8
        assert set(got) == set(all_sign_vectors(2))

    def test_plane_with_alternating_normal(self):
        S = Subspace.from_kernel_rep(M([1, -1, 1]))
        got = subspace_sign_vectors(S)
        names = {"".join("+0-"[1 - e] for e in v.entries) for v in got}
        assert names == {"+++", "---", "++0", "--0", "0++", "0--",
                         "+0-", "-0+", "+--", "-++", "++-", "--+"}
        assert len(got) == 12

    def test_line(self):
        S = Subspace.from_image(RationalMatrix(2, 1, [[1], [1]]))
        got = subspace_sign_vectors(S)
        assert [v.entries for v in got] == [(-1, -1), (1, 1)]

    def test_matches_brute_enumeration(self):
        rng = random.Random(7)
        for _ in range(12):
            n = rng.randint(1, 4)
            k = rng.randint(0, n)
            Z = RationalMatrix(k, n, [[F(rng.randint(-2, 2)) for _ in range(n)]
                                      for _ in range(k)])
            S = Subspace.from_kernel_rep(Z)
            if S.dim == 0:
                assert subspace_sign_vectors(S) == ()
                continue
            assert tuple(v.entries for v in subspace_sign_vectors(S)) == \
                tuple(v.entries for v in enumerate_subspace_signs(S))

    def test_every_reported_vector_is_realizable(self):
        S = Subspace.from_kernel_rep(M([1, -1, 1]))
        for tau in subspace_sign_vectors(S):
            z = realize_sign_in_subspace(S, tau)
            assert z is not None
            assert sigma(z) == tau
            assert S.contains(z)

    def test_cached_on_the_subspace(self):
        S = Subspace.from_kernel_rep(M([1, 2, 3]))
        assert subspace_sign_vectors(S) is subspace_sign_vectors(S)

    def test_zero_subspace(self):
        S = Subspace.from_kernel_rep(M([1, 0], [0, 1]))
        assert subspace_sign_vectors(S) == ()

    def test_dimension_cap(self):
        S = Subspace.full(4)
        with pytest.raises(CapExceeded) as err:
            subspace_sign_vectors(S, Caps(sign_enum_dim=3))
        assert err.value.cap_name == "sign_enum_dim"

    def test_kernel_sign_vectors(self):
        got = kernel_sign_vectors(M([1, 1]))
        assert [v.entries for v in got] == [(-1, 1), (1, -1)]


class TestPairsAndConcordance:
    def test_pair_sign_feasible_witness(self):
        B = M([1, 1], [1, 0])
        v = pair_sign_feasible(B, (-1, 1), (-1, -1))
        assert v is not None
        assert sigma(v).entries == (-1, 1)
        assert sigma(B.apply(v)).entries == (-1, -1)

    def test_pair_sign_infeasible(self):
        B = M([1, 0], [0, 1])
        assert pair_sign_feasible(B, (1, 1), (-1, 1)) is None

    def test_concordant_examples(self):
        W = parse_signsets_text("+ + -\n+ + +")
        assert concordant_pair(sv(0, 0), sv(-1, 1, 1), W)
        assert not concordant_pair(sv(0, 0), sv(-1, -1, -1), W)
        assert concordant_pair(sv(1, 1), sv(1, 0, 0), W)

    def test_agrees_with_lp_construction_exhaustively(self):
        rng = random.Random(15)
        shapes = [(1, 2), (2, 2), (2, 3)]
        for r, n in shapes:
            for _ in range(2):
                W = SignSetMatrix_random(rng, r, n)
                for rho in all_sign_vectors(r, include_zero=True):
                    for tau in all_sign_vectors(n, include_zero=True):
                        assert concordant_pair(rho, tau, W) == \
                            lp_concordant(rho.entries, tau.entries, W), \
                            (W, rho.entries, tau.entries)

    def test_member_rows_hit_targets_exactly(self):
        W = parse_signsets_text("+ + -\n+ + +")
        x = (F(-1), F(1), F(2))
        B = signset_member_rows(W, x, (F(0), F(0)))
        assert W.contains(B)
        assert B.apply(x) == (F(0), F(0))

    def test_member_rows_nonzero_targets(self):
        W = parse_signsets_text("0+ -0\n* +")
        x = (F(3), F(-2))
        targets = (F(5), F(-7, 3))
        B = signset_member_rows(W, x, targets)
        assert W.contains(B)
        assert B.apply(x) == targets

    def test_member_rows_random(self):
        rng = random.Random(33)
        built = 0
        for _ in range(60):
            r, n = rng.randint(1, 3), rng.randint(1, 3)
            W = SignSetMatrix_random(rng, r, n)
            tau = tuple(rng.choice((-1, 0, 1)) for _ in range(n))
            rho = tuple(rng.choice((-1, 0, 1)) for _ in range(r))
            if not concordant_pair(sv(*rho), sv(*tau), W):
                continue
            x = tuple(F(t) * rng.randint(1, 4) for t in tau)
            targets = tuple(F(s) * F(rng.randint(1, 5), rng.randint(1, 3))
                            for s in rho)
            B = signset_member_rows(W, x, targets)
            assert W.contains(B)
            assert B.apply(x) == targets
            built += 1
        assert built >= 15


def SignSetMatrix_random(rng, r, n):
    from injcheck.classes import SignSetMatrix

    return SignSetMatrix(tuple(
        tuple(rng.choice(ALL_SIGN_SETS) for _ in range(n)) for _ in range(r)))


class TestScaledRoute:
    def test_injective_two_species_example(self):
        res = sign_route(Scaled(M([1, 1], [2, 1])), Subspace.full(2), None)
        assert res.supported and res.injective
        assert res.hit is None

    def test_singular_base_matrix_has_witness(self):
        res = sign_route(Scaled(M([1, 1], [1, 1])), Subspace.full(2), None)
        assert res.supported and not res.injective
        hit = res.hit
        w = hit.member.matrix.apply(hit.z)
        assert all(x == 0 for x in w)
        assert all(k > 0 for k in hit.member.kappa)
        assert all(l > 0 for l in hit.member.lam)
        assert sigma(hit.z) == hit.tau
        B, v, zz = hit.lift_data
        assert all(x == 0 for x in B.apply(v))
        assert sigma(v) == sigma(zz)

    def test_restricting_the_domain_restores_injectivity(self):
        # singular base matrix, but the coset direction misses every
        # kernel sign vector
        S = Subspace.from_image(RationalMatrix(2, 1, [[1], [1]]))
        res = sign_route(Scaled(M([1, 1], [1, 1])), S, None)
        assert res.injective

    def test_left_matrix_composition(self):
        # two reactions feeding back on two species
        N = M([1, -1], [-1, 1])
        B = M([1, 1], [1, 0])
        S = Subspace.from_image(RationalMatrix(2, 1, [[1], [-1]]))
        res = sign_route(Scaled(B), S, N)
        assert res.supported and not res.injective
        hit = res.hit
        assert hit.rho is not None and not hit.rho.is_zero()
        w = hit.member.matrix.apply(hit.z)
        assert all(x == 0 for x in N.apply(w))
        assert S.contains(hit.z) and any(x != 0 for x in hit.z)

    def test_deterministic_hits(self):
        a = sign_route(Scaled(M([1, 1], [1, 1])), Subspace.full(2), None)
        b = sign_route(Scaled(M([1, 1], [1, 1])), Subspace.full(2), None)
        assert a.hit.z == b.hit.z
        assert a.hit.member.matrix == b.hit.member.matrix


class TestPatternRoute:
    def test_positive_determinant_pattern_injective(self):
        res = sign_route(SignPattern(((1, -1), (1, 1))), Subspace.full(2), None)
        assert res.supported and res.injective

    def test_full_positive_pattern_not_injective(self):
        res = sign_route(SignPattern(((1, 1), (1, 1))), Subspace.full(2), None)
        assert not res.injective
        hit = res.hit
        assert all(x == 0 for x in hit.member.matrix.apply(hit.z))

    def test_wide_pattern_frozen_witness(self):
        S = Subspace.from_kernel_rep(M([1, -1, 1]))
        W = parse_signsets_text("+ + -\n+ + +")
        res = sign_route(SignSets(W), S, None)
        assert not res.injective
        hit = res.hit
        assert hit.tau.entries == (-1, 1, 1)
        assert hit.z == (F(-1), F(1), F(2))
        assert hit.member.matrix == M([1, 3, -1], [3, 1, 1])

    def test_multi_sign_sets(self):
        W = parse_signsets_text("0+ -")
        res = sign_route(SignSets(W), Subspace.full(2), None)
        assert not res.injective
        assert W.contains(res.hit.member.matrix)
        assert all(x == 0 for x in res.hit.member.matrix.apply(res.hit.z))

    def test_pattern_with_left_matrix(self):
        A = M([1, -1])
        W = parse_signsets_text("+ 0\n0 +")
        res = sign_route(SignSets(W), Subspace.full(2), A)
        assert res.supported and not res.injective
        hit = res.hit
        w = hit.member.matrix.apply(hit.z)
        assert all(x == 0 for x in A.apply(w))


class TestIntervalRoute:
    def test_open_box_full_plane_witness(self):
        D = parse_interval_box_text("(0,inf) (0,inf)\n(0,inf) (0,inf)")
        res = sign_route(Interval(D), Subspace.full(2), None)
        assert not res.injective
        hit = res.hit
        assert D.contains(hit.member.matrix)
        assert all(x == 0 for x in hit.member.matrix.apply(hit.z))
        assert sigma(hit.z) == hit.tau

    def test_open_box_on_diagonal_injective(self):
        D = parse_interval_box_text("(0,inf) (0,inf)\n(0,inf) (0,inf)")
        S = Subspace.from_image(RationalMatrix(2, 1, [[1], [1]]))
        res = sign_route(Interval(D), S, None)
        assert res.injective

    def test_degenerate_diagonal_with_left_matrix(self):
        A = M([1, -1])
        D = parse_interval_box_text("(0,1) {0}\n{0} {1}")
        full = sign_route(Interval(D), Subspace.full(2), A)
        assert not full.injective
        assert full.hit.z == (F(-2), F(-1))
        assert full.hit.member.matrix == M([F(1, 2), 0], [0, 1])
        diagonal = sign_route(Interval(D), Subspace.from_image(
            RationalMatrix(2, 1, [[1], [1]])), A)
        assert diagonal.injective

    def test_punctured_entry_blocks_zero(self):
        D = parse_interval_box_text("(-inf,0)u(0,inf)")
        res = sign_route(Interval(D), Subspace.full(1), None)
        assert res.injective

    def test_zero_allowed_entry(self):
        D = parse_interval_box_text("[0,1]")
        res = sign_route(Interval(D), Subspace.full(1), None)
        assert not res.injective
        assert res.hit.member.matrix == M([0])

    def test_interval_kernel_feasible_shapes(self):
        D = parse_interval_box_text("(0,1) {0}\n{0} {1}")
        z, u = interval_kernel_feasible(D, Subspace.full(2), sv(-1, -1), M([1, -1]))
        assert sigma(z).entries == (-1, -1)
        assert u[0] == u[1]
        member = interval_member_through(D, z, u)
        assert D.contains(member)
        assert member.apply(z) == tuple(u)

    def test_member_through_random(self):
        rng = random.Random(5)
        texts = ["(0,1) [1,2]\n(-2,-1) (0,inf)", "[0,0] (0,inf)\n(-inf,0) {3}"]
        for text in texts:
            D = parse_interval_box_text(text)
            for _ in range(10):
                z = tuple(F(rng.randint(-3, 3)) for _ in range(2))
                if all(x == 0 for x in z):
                    continue
                targets = []
                ok = True
                for i in range(2):
                    lo, hi = _row_range(D, i, z)
                    if lo is None or hi is None or lo >= hi:
                        ok = False
                        break
                    targets.append((lo + hi) / 2)
                if not ok:
                    continue
                member = interval_member_through(D, z, tuple(targets))
                assert D.contains(member)
                assert member.apply(z) == tuple(targets)


def _row_range(D, i, z):
    lo = F(0)
    hi = F(0)
    for j, zj in enumerate(z):
        e = D.at(i, j)
        if e.lower is None or e.upper is None:
            if zj != 0:
                return None, None
            continue
        a, b = e.lower * zj, e.upper * zj
        lo += min(a, b)
        hi += max(a, b)
    if lo == hi:
        return None, None
    return lo, hi
