import json

import numpy as np
import pytest
from hypothesis import given

from groupwl import catalog, constructors as c
from groupwl.errors import NotCentral, NotIsomorphism, ParseError, TooLarge, ValidationError
from groupwl.group import ColoredGroup, validate
from groupwl.io import format_json, format_mt, parse_group, parse_json, parse_mt, scan_catalog, write_group
from groupwl.isomorphism import is_isomorphic

from strategies import group_names


class TestFamilies:
    def test_trivial(self):
        assert c.make_cyclic(1).order == 1

    def test_symmetric3(self):
        s3 = c.make_symmetric(3)
        assert s3.order == 6 and not s3.is_abelian

    def test_dihedral4(self):
        d = c.make_dihedral(4)
        assert d.order == 8 and len(d.center()) == 2

    @pytest.mark.parametrize("fn,args,order", [
        (c.make_cyclic, (7,), 7),
        (c.make_dihedral, (5,), 10),
        (c.make_dicyclic, (3,), 12),
        (c.make_quaternion8, (), 8),
        (c.make_symmetric, (4,), 24),
        (c.make_alternating, (5,), 60),
        (c.make_elementary_abelian, (3, 2), 9),
        (c.make_abelian, ([2, 4],), 8),
    ])
    def test_orders_and_validity(self, fn, args, order):
        g = fn(*args)
        assert g.order == order
        validate(g.table)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            c.make_symmetric(9)

    def test_quaternion_unique_involution(self):
        q = c.make_quaternion8()
        assert sum(q.element_order(x) == 2 for x in range(8)) == 1


class TestProducts:
    def test_trivial_factor(self, d8):
        p, proj_g, _ = c.direct_product(d8, c.make_cyclic(1))
        assert is_isomorphic(p, d8)
        assert list(proj_g) == list(range(8))

    def test_c2_c3(self):
        p = c.direct_product(c.make_cyclic(2), c.make_cyclic(3))[0]
        assert is_isomorphic(p, c.make_cyclic(6))

    def test_s3_squared(self):
        s3 = c.make_symmetric(3)
        p = c.direct_product(s3, s3)[0]
        assert p.order == 36 and p.center() == frozenset({0})

    def test_projections_are_homomorphisms(self, d8, q8):
        p, pg, ph = c.direct_product(d8, q8)
        for x in range(0, p.order, 5):
            for y in range(0, p.order, 7):
                xy = p.mul(x, y)
                assert pg[xy] == d8.mul(pg[x], pg[y])
                assert ph[xy] == q8.mul(ph[x], ph[y])

    @given(group_names(6), group_names(6), group_names(4))
    def test_associative_up_to_iso(self, a, b, d):
        g, h, k = catalog.get(a), catalog.get(b), catalog.get(d)
        left = c.direct_product(c.direct_product(g, h)[0], k)[0]
        right = c.direct_product(g, c.direct_product(h, k)[0])[0]
        assert is_isomorphic(left, right)

    def test_central_trivial_is_direct(self, d8):
        c2 = c.make_cyclic(2)
        cp = c.central_product(d8, c2, [0], [0], {0: 0})
        assert is_isomorphic(cp, c.direct_product(d8, c2)[0])

    def test_central_q8_c4(self):
        q, c4 = c.make_quaternion8(), c.make_cyclic(4)
        zq = max(q.center())
        cp = c.central_product(q, c4, [0, zq], [0, 2], {0: 0, zq: 2})
        assert cp.order == 16
        validate(cp.table)

    def test_central_d8_d8(self, d8):
        z = max(d8.center())
        cp = c.central_product(d8, d8, [0, z], [0, z], {0: 0, z: z})
        assert cp.order == 32
        # extraspecial: center of order 2
        assert len(cp.center()) == 2

    def test_central_errors(self, d8):
        s = next(x for x in range(8) if x not in d8.center() and d8.element_order(x) == 2)
        with pytest.raises(NotCentral):
            c.central_product(d8, d8, [0, s], [0, s], {0: 0, s: s})
        c4 = c.make_cyclic(4)
        with pytest.raises(NotIsomorphism):
            c.central_product(c4, c4, [0, 2], [0, 2], {0: 2, 2: 0})


class TestFormats:
    @given(group_names(16))
    def test_mt_round_trip(self, name):
        g = catalog.get(name)
        text = format_mt(g)
        back = parse_mt(text)
        assert np.array_equal(back.group.table, g.table)
        assert format_mt(back) == text

    def test_colors_round_trip(self, tmp_path, d8):
        cg = ColoredGroup(d8, [0, 1, 1, 0, 2, 2, 0, 1])
        for suffix in (".mt", ".json"):
            path = tmp_path / f"g{suffix}"
            write_group(cg, path)
            first = path.read_bytes()
            back = parse_group(path)
            assert back.colors.tolist() == cg.colors.tolist()
            write_group(back, path)
            assert path.read_bytes() == first

    def test_missing_colors_is_uniform(self):
        cg = parse_mt("2\n0 1\n1 0\n")
        assert cg.colors.tolist() == [0, 0]

    def test_comments_ignored(self):
        cg = parse_mt("# hello\n# name: C2\n2\n0 1\n# mid\n1 0\n")
        assert cg.group.name == "C2" and cg.order == 2

    def test_bad_row_length(self):
        with pytest.raises(ParseError) as err:
            parse_mt("2\n0 1\n1\n")
        assert err.value.line == 3
        assert "row 1" in str(err.value)

    def test_non_integer(self):
        with pytest.raises(ParseError) as err:
            parse_mt("2\n0 1\n1 x\n")
        assert (err.value.line, err.value.column) == (3, 3)

    def test_validation_delegated(self):
        with pytest.raises(ValidationError):
            parse_mt("2\n0 1\n1 1\n")

    def test_json_mirror(self, d8):
        doc = json.loads(format_json(d8))
        assert doc["order"] == 8
        assert np.array_equal(parse_json(format_json(d8)).group.table, d8.table)
        with pytest.raises(ParseError):
            parse_json("{not json")

    def test_scan_catalog(self, tmp_path):
        write_group(catalog.get("Q8"), tmp_path / "SmallGroup_8_4.mt")
        write_group(catalog.get("C4"), tmp_path / "c4.json")
        (tmp_path / "notes.txt").write_text("ignored")
        entries = scan_catalog(tmp_path)
        assert [e.order for e in entries] == [4, 8]
        assert entries[1].catalog_id == (8, 4)
        assert entries[0].catalog_id is None

    def test_catalog_export(self, tmp_path):
        paths = catalog.export(tmp_path, max_order=8)
        assert len(paths) == len(catalog.names(max_order=8))
        for p in paths:
            cg = parse_group(p)
            assert is_isomorphic(cg.group, catalog.get(cg.group.name))


def test_catalog_pairwise_non_isomorphic():
    gs = catalog.groups(max_order=24)
    for i, g in enumerate(gs):
        for h in gs[i + 1:]:
            if g.order == h.order:
                assert not is_isomorphic(g, h), (g.name, h.name)
