import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupwl import catalog, constructors as c
from groupwl.errors import MissingInverse, NoIdentityAtZero, NotAssociative, NotClosed, NotNormal, ValidationError
from groupwl.group import ColoredGroup, validate
from groupwl.isomorphism import find_isomorphism, is_isomorphic

from strategies import group_and_elements, group_and_subset, group_names


def naive_closure(g, gens):
    s = {0} | set(gens)
    while True:
        new = {g.mul(a, b) for a in s for b in s} | s
        if new == s:
            return frozenset(s)
        s = new


def rotation_and_reflection(d8):
    r = next(x for x in range(8) if d8.element_order(x) == 4)
    s = next(x for x in range(8) if d8.element_order(x) == 2 and x not in d8.center())
    return r, s


class TestValidate:
    def test_trivial(self):
        g = validate([[0]])
        assert g.order == 1

    def test_c2(self):
        assert validate([[0, 1], [1, 0]]).order == 2

    def test_row_repeat_names_cell(self):
        with pytest.raises(NotClosed) as err:
            validate([[0, 1], [1, 1]])
        assert err.value.cell[0] == 1

    def test_out_of_range(self):
        with pytest.raises(NotClosed) as err:
            validate([[0, 1], [1, 2]])
        assert err.value.cell == (1, 1)

    def test_identity_not_at_zero(self):
        with pytest.raises(NoIdentityAtZero):
            validate([[1, 0], [0, 1]])

    def test_non_associative(self):
        # a Latin square with identity 0 that is not a group (order 5 loop)
        loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
        with pytest.raises(NotAssociative):
            validate(loop)

    def test_error_hierarchy(self):
        for cls in (NotClosed, NoIdentityAtZero, NotAssociative, MissingInverse):
            assert issubclass(cls, ValidationError)

    def test_non_square(self):
        with pytest.raises(NotClosed):
            validate([[0, 1]])


class TestElementOps:
    def test_identity_order(self, d8):
        assert d8.element_order(0) == 1

    def test_dihedral_commutator(self, d8):
        r, _ = rotation_and_reflection(d8)
        r2 = d8.power(r, 2)
        for s in range(8):
            if d8.element_order(s) == 2 and s not in d8.center():
                assert d8.commutator(r, s) == r2

    def test_conjugate_convention(self, d8):
        for g, h in itertools.product(range(8), repeat=2):
            assert d8.conjugate(g, h) == d8.mul(d8.mul(h, g), d8.inv(h))

    @given(group_and_elements(2))
    def test_inverse_and_lagrange(self, ge):
        g, (x, _) = ge
        assert g.mul(x, g.inv(x)) == 0
        assert g.order % g.element_order(x) == 0
        assert g.power(x, g.element_order(x)) == 0

    @given(group_and_elements(2))
    def test_commutator_definition(self, ge):
        g, (x, y) = ge
        assert g.commutator(x, y) == g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y)))


class TestSubgroups:
    def test_empty_generators(self, d8):
        assert d8.generated_subgroup([]) == frozenset({0})

    def test_three_cycle(self):
        s3 = catalog.get("S3")
        x = next(x for x in range(6) if s3.element_order(x) == 3)
        assert len(s3.generated_subgroup([x])) == 3

    def test_all_elements(self, d8):
        assert d8.generated_subgroup(range(8)) == d8.elements

    @given(group_and_subset())
    def test_generated_matches_naive(self, gs):
        g, s = gs
        assert g.generated_subgroup(s) == naive_closure(g, s)

    def test_normal_closure_central(self, d8):
        z = max(d8.center())
        assert d8.normal_closure([z]) == frozenset({0, z})

    def test_normal_closure_in_s4(self):
        s4 = catalog.get("S4")
        transposition = next(x for x in range(24) if s4.element_order(x) == 2 and s4.class_sizes[x] == 6)
        double = next(x for x in range(24) if s4.element_order(x) == 2 and s4.class_sizes[x] == 3)
        assert len(s4.normal_closure([transposition])) == 24
        assert len(s4.normal_closure([double])) == 4

    @given(group_and_subset())
    def test_normal_closure_is_conjugation_closed(self, gs):
        g, s = gs
        n = g.normal_closure(s)
        assert all(g.conjugate(x, h) in n for x in n for h in range(g.order))
        assert s <= n

    def test_center(self, d8):
        assert len(d8.center()) == 2
        assert catalog.get("C4xC2").center() == frozenset(range(8))

    def test_normalizer_of_sylow3(self):
        s3 = catalog.get("S3")
        p = s3.generated_subgroup([next(x for x in range(6) if s3.element_order(x) == 3)])
        assert s3.normalizer(p) == s3.elements

    @given(group_and_subset())
    def test_centralizer_brute_force(self, gs):
        g, s = gs
        expected = frozenset(x for x in range(g.order) if all(g.mul(x, y) == g.mul(y, x) for y in s))
        assert g.centralizer(s) == expected


class TestClassesAndNormals:
    def test_abelian_classes(self):
        assert all(len(k) == 1 for k in catalog.get("C6").conjugacy_classes())

    def test_class_sizes(self):
        assert sorted(len(k) for k in catalog.get("S3").conjugacy_classes()) == [1, 2, 3]
        assert sorted(len(k) for k in catalog.get("S4").conjugacy_classes()) == [1, 3, 6, 6, 8]

    def test_normal_subgroups_examples(self):
        assert [len(n) for n in catalog.get("A5").normal_subgroups()] == [1, 60]
        assert [len(n) for n in catalog.get("S4").normal_subgroups()] == [1, 4, 12, 24]
        assert len(catalog.get("C6").normal_subgroups()) == 4

    @pytest.mark.parametrize("name", catalog.names(max_order=24))
    def test_normal_subgroups_match_naive_filter(self, name):
        g = catalog.get(name)
        naive = sorted((s for s in g.subgroups() if g.is_normal(s)), key=lambda s: (len(s), sorted(s)))
        assert g.normal_subgroups() == naive


class TestQuotient:
    def test_trivial_quotient(self, d8):
        q, cmap = d8.quotient_group([0])
        assert is_isomorphic(q, d8)

    def test_s4_mod_v4(self):
        s4 = catalog.get("S4")
        v4 = next(n for n in s4.normal_subgroups() if len(n) == 4)
        q, _ = s4.quotient_group(v4)
        assert q.order == 6 and is_isomorphic(q, catalog.get("S3"))

    def test_full_quotient(self, d8):
        assert d8.quotient_group(d8.elements)[0].order == 1

    def test_not_normal(self):
        s3 = catalog.get("S3")
        s = next(x for x in range(6) if s3.element_order(x) == 2)
        with pytest.raises(NotNormal):
            s3.quotient_group([0, s])

    @pytest.mark.parametrize("name", ["D8", "Q8", "S4", "SL(2,3)", "C3:D8"])
    def test_quotients_validate(self, name):
        g = catalog.get(name)
        for n in g.normal_subgroups():
            q, cmap = g.quotient_group(n)
            validate(q.table)
            assert cmap[0] == 0
            assert q.order * len(n) == g.order


class TestIsomorphism:
    def test_self(self, d8):
        phi = find_isomorphism(d8, d8)
        assert phi is not None

    def test_c4_v4(self):
        assert not is_isomorphic(catalog.get("C4"), catalog.get("C2xC2"))

    def test_d12_c2_s3(self):
        prod = c.direct_product(c.make_cyclic(2), c.make_symmetric(3))[0]
        phi = find_isomorphism(c.make_dihedral(6), prod)
        assert phi is not None
        d12 = c.make_dihedral(6)
        t = d12.table
        assert np.array_equal(phi[t], prod.table[np.ix_(phi, phi)])

    @given(group_names(16), group_names(16))
    def test_symmetric_relation(self, a, b):
        g, h = catalog.get(a), catalog.get(b)
        assert is_isomorphic(g, h) == is_isomorphic(h, g)
        assert is_isomorphic(g, h) == (a == b)

    @given(group_names(16), st.randoms(use_true_random=False))
    def test_relabel_invariance(self, name, rnd):
        g = catalog.get(name)
        perm = [0] + rnd.sample(range(1, g.order), g.order - 1)
        assert is_isomorphic(g, g.relabel(perm))


class TestColoredGroup:
    def test_default_uniform(self, d8):
        cg = ColoredGroup(d8)
        assert cg.is_uniform()

    def test_colors_densified(self, d8):
        cg = ColoredGroup(d8, [5, 9, 5, 9, 5, 9, 5, 9])
        assert sorted(set(cg.colors.tolist())) == [0, 1]
