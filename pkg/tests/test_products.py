import itertools
import random

import pytest

from groupwl import catalog, constructors as c, invariants as inv, products as pr, wl
from groupwl.errors import AbelianInput, DecompositionMismatch
from groupwl.isomorphism import is_isomorphic

UPTO32 = catalog.names(max_order=32)


def element(g, order, central=None):
    for x in range(g.order):
        if g.element_order(x) == order and (central is None or (x in g.center()) == central):
            return x
    raise LookupError


def product(a, b):
    return c.direct_product(catalog.get(a), catalog.get(b))


class TestSplitting:
    def test_cyclic_generator(self):
        c6 = catalog.get("C6")
        assert pr.splits_abelian(c6, element(c6, 6))

    def test_c2_c4(self):
        g, pa, pb = product("C2", "C4")
        b = next(x for x in range(8) if pa[x] == 0 and g.element_order(x) == 4)
        a = next(x for x in range(8) if pb[x] == 0 and pa[x] == 1)
        assert not pr.splits_abelian(g, g.power(b, 2))
        assert pr.splits_abelian(g, a)

    def test_identity_splits(self, d8):
        assert pr.splits_general(d8, 0)
        assert pr.complement_search(d8, 0) == d8.elements

    def test_d8_center_does_not_split(self, d8):
        assert not pr.splits_general(d8, max(d8.center()))

    def test_noncentral_never_splits(self, d8):
        s = element(d8, 2, central=False)
        assert not pr.splits_general(d8, s)

    def test_d8_c3(self):
        g, pd, pc = product("D8", "C3")
        z = next(x for x in range(24) if pd[x] == 0 and pc[x] != 0)
        assert pr.splits_general(g, z)
        comp = pr.complement_search(g, z)
        assert comp is not None and len(comp) == 8

    @pytest.mark.parametrize("name", UPTO32)
    def test_matches_complement_search(self, name):
        g = catalog.get(name)
        for z in g.center():
            assert pr.splits_general(g, z) == (pr.complement_search(g, z) is not None)

    @pytest.mark.parametrize("name", ["D8xC2", "C4xC2", "Q8xC4", "C3xD8", "C6xC2^2"])
    def test_splits_in_subgroups(self, name):
        g = catalog.get(name)
        rnd = random.Random(7)
        subs = [s for s in g.subgroups() if len(s) > 1]
        for u in rnd.sample(subs, min(12, len(subs))):
            ug, emb = g.as_group(u)
            pos = {int(x): i for i, x in enumerate(emb)}
            for z in g.center() & u:
                if pr.splits_general(g, z):
                    assert pr.complement_search(ug, pos[z]) is not None

    @pytest.mark.parametrize("a,b", [("C4", "D8"), ("C2", "D8"), ("C4", "C2"), ("Q8", "C4"), ("C9", "C3xS3")])
    def test_componentwise(self, a, b):
        g1, g2 = catalog.get(a), catalog.get(b)
        g, p1, p2 = c.direct_product(g1, g2)
        for z in g.center():
            o = g.element_order(z)
            if o == 1 or len(_primes(o)) != 1:
                continue
            z1, z2 = int(p1[z]), int(p2[z])
            expected = ((g1.element_order(z1) == o and pr.splits_general(g1, z1))
                        or (g2.element_order(z2) == o and pr.splits_general(g2, z2)))
            assert pr.splits_general(g, z) == expected


def _primes(n):
    return {p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))}


class TestGraph:
    def test_abelian_edgeless(self):
        assert not pr.noncommuting_graph(catalog.get("C6")).adjacency.any()

    def test_s3(self):
        s3 = catalog.get("S3")
        lab = pr.components_on(pr.noncommuting_graph(s3), set(range(1, 6)))
        assert len(set(lab.values())) == 1 and len(lab) == 5

    def test_s3xs3_pure_parts(self):
        g, pa, pb = product("S3", "S3")
        left = {x for x in range(36) if pb[x] == 0 and pa[x] != 0}
        right = {x for x in range(36) if pa[x] == 0 and pb[x] != 0}
        lab = pr.components_on(pr.noncommuting_graph(g), left | right)
        assert len(set(lab.values())) == 2
        assert len({lab[x] for x in left}) == 1

    @pytest.mark.parametrize("name", ["S3", "D8", "Q8", "A4", "S4", "D8xC2"])
    def test_noncentral_connected(self, name):
        g = catalog.get(name)
        lab = pr.components_on(pr.noncommuting_graph(g), g.elements - g.center())
        assert len(set(lab.values())) == 1


class TestComponents:
    def test_abelian_rejected(self):
        with pytest.raises(AbelianInput):
            pr.nonabelian_components(catalog.get("C6"))

    def test_s3(self):
        dec = pr.nonabelian_components(catalog.get("S3"))
        assert dec.subgroups == [frozenset(range(6))]

    def test_s3xs3(self):
        g, pa, pb = product("S3", "S3")
        dec = pr.nonabelian_components(g)
        left = frozenset(x for x in range(36) if pb[x] == 0)
        right = frozenset(x for x in range(36) if pa[x] == 0)
        assert sorted(dec.subgroups, key=sorted) == sorted([left, right], key=sorted)

    @pytest.mark.parametrize("name", ["D8xQ8", "S3xS3", "D8xC2", "C3xD8", "C2xS4", "Q8xC4", "S3xD10"])
    def test_component_properties(self, name):
        g = catalog.get(name)
        dec = pr.nonabelian_components(g)
        z = g.center()
        for n in dec.subgroups:
            assert z <= n
            assert not all(g.mul(a, b) == g.mul(b, a) for a in n for b in n)
        for a, b in itertools.combinations(dec.subgroups, 2):
            assert all(g.mul(x, y) == g.mul(y, x) for x in a for y in b)
        assert pr._product(g, dec.subgroups) == g.elements
        assert all(x <= y for x, y in zip(dec.trace, dec.trace[1:]))
        factors = pr.direct_factorization(g).factors
        blocks = pr.component_blocks(g, dec, factors)
        assert sorted(i for b in blocks for i in b) == list(range(len(dec.subgroups)))
        for f, b in zip(factors, blocks):
            if b:
                assert pr._product(g, [dec.subgroups[i] for i in b]) == g.product_set(f, z)

    def test_m_set_detected_by_wl(self):
        g = catalog.get("D8xC2")
        dec = pr.nonabelian_components(g)
        colors = wl.element_coloring(wl.stable_coloring(g, 3, "II"))
        assert wl.is_union_of_classes(colors, dec.m_set)


class TestFullness:
    def test_central(self, d8):
        dec = pr.nonabelian_components(d8)
        z = max(d8.center())
        cx, nx = pr.cx_nx(d8, dec, z)
        assert cx == d8.elements and nx == d8.center()
        rep = pr.is_full(d8, z, dec)
        assert rep.full and rep.factors == []

    def test_s3xs3(self):
        g, pa, pb = product("S3", "S3")
        dec = pr.nonabelian_components(g)
        left = frozenset(x for x in range(36) if pb[x] == 0)
        right = frozenset(x for x in range(36) if pa[x] == 0)
        s = next(x for x in left if g.element_order(x) == 2)
        cx, nx = pr.cx_nx(g, dec, s)
        assert nx == left and cx == right
        assert pr.is_full(g, s, dec, [left, right]).factors == [0]
        t = next(x for x in right if g.element_order(x) == 2)
        st = g.mul(s, t)
        rep = pr.is_full(g, st, dec, [left, right])
        assert rep.full and rep.factors == [0, 1]
        cx, nx = pr.cx_nx(g, dec, st)
        assert pr.check_direct(g, [nx])

    def test_full_independent_of_decomposition(self):
        g = catalog.get("D8xC2")
        dec = pr.nonabelian_components(g)
        a = pr.direct_factorization(g, "largest").factors
        b = pr.direct_factorization(g, "smallest").factors
        for x in range(g.order):
            assert pr.is_full(g, x, dec, a).full == pr.is_full(g, x, dec, b).full


class TestFactorization:
    def test_c6(self):
        d = pr.direct_factorization(catalog.get("C6"))
        assert sorted(d.labels) == ["C2", "C3"]

    def test_s4(self):
        d = pr.direct_factorization(catalog.get("S4"))
        assert d.labels == ["S4"] and d.indecomposable == [True]

    def test_d8_c3(self):
        g = product("D8", "C3")[0]
        d = pr.direct_factorization(g)
        assert sorted(d.labels) == ["C3", "D8"]
        assert len(d.abelian_factor) == 3

    @pytest.mark.parametrize("name", catalog.names(max_order=64))
    def test_search_order_independent(self, name):
        g = catalog.get(name)
        a = pr.direct_factorization(g, "largest")
        b = pr.direct_factorization(g, "smallest")
        assert sorted(a.labels) == sorted(b.labels)
        assert pr.check_direct(g, a.factors) and pr.check_direct(g, b.factors)
        z = g.center()
        nonab = lambda d: sorted(sorted(g.product_set(f, z)) for f in d.factors if not pr._abelian_set(g, f))
        assert nonab(a) == nonab(b)
        assert len(a.abelian_factor) == len(b.abelian_factor)

    def test_equivalence_of_products(self):
        # C8xC2 and M16 are not separated by 2-WL_I; neither are C4xC2xC2 and D8oC4
        g1, h1 = catalog.get("C8xC2"), catalog.get("M16")
        g2, h2 = catalog.get("C2"), catalog.get("C2")
        assert wl.joint_compare(g1, h1, 2, "I").equivalent
        a = c.direct_product(g1, g2)[0]
        b = c.direct_product(h1, h2)[0]
        assert wl.joint_compare(a, b, 2, "I").equivalent
        assert not is_isomorphic(a, b)


class TestFiltration:
    def test_abelian_all_right(self):
        f = pr.build_filtration(catalog.get("C4xC2"))
        assert set(f.sides) == {"R"}
        assert f.chain[-1] == frozenset(range(8))

    def test_q8_c4(self):
        g = catalog.get("Q8xC4")
        f = pr.build_filtration(g)
        assert [len(t) for t in f.chain] == [1, 2, 4, 8]
        assert f.chain[-1] == g.center()

    def test_d8_c2(self):
        f = pr.build_filtration(catalog.get("D8xC2"))
        assert [len(t) for t in f.chain] == [1, 2, 4]
        assert sorted(f.sides) == ["L", "R"]

    @pytest.mark.parametrize("name", catalog.names(max_order=32))
    def test_steps_componentwise(self, name):
        g = catalog.get(name)
        f = pr.build_filtration(g)
        d = pr.direct_factorization(g)
        left = d.nonabelian_part(g)
        for lo, hi, side in zip(f.chain, f.chain[1:], f.sides):
            assert lo < hi
            other = left if side == "L" else d.abelian_factor
            assert hi <= g.product_set(lo, other)

    def test_mismatch(self, d8):
        with pytest.raises(DecompositionMismatch):
            pr.build_filtration(d8, d8.center(), d8.center())
