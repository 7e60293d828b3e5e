import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupwl import catalog, kernels, pebble, wl
from groupwl.errors import CapExceeded
from groupwl.pebble import PebbleConfig


def brute_force_game(g, h, p, version):
    """Spoiler-winning set by enumerating every bijection (tiny orders only)."""
    n = g.order
    cond = pebble.winning_condition_table(pebble.as_colored(g), pebble.as_colored(h), p - 1, version)
    configs = list(itertools.product(range(n * n + 1), repeat=p))
    base = n * n + 1
    enc = {c: sum(d * base ** (p - 1 - j) for j, d in enumerate(c)) for c in configs}
    bijections = list(itertools.permutations(range(n)))
    W = set()
    while True:
        new = set(W)
        for c in configs:
            if c in W:
                continue
            for i in range(p):
                red = c[:i] + c[i + 1:]
                r = sum(d * base ** (p - 2 - j) for j, d in enumerate(red))
                if cond[r]:
                    new.add(c)
                    break
                if all(any(c[:i] + (1 + x * n + f[x],) + c[i + 1:] in W for x in range(n)) for f in bijections):
                    new.add(c)
                    break
        if new == W:
            return {enc[c] for c in W}
        W = new


class TestConfig:
    def test_parse_round_trip(self):
        cfg = PebbleConfig.parse("1,2;-;3,0", 4)
        assert cfg.slots == ((1, 2), None, (3, 0), None)
        assert PebbleConfig.parse(str(cfg), 4) == cfg

    @given(st.integers(2, 6), st.integers(1, 4), st.data())
    def test_encode_decode(self, n, p, data):
        idx = data.draw(st.integers(0, (n * n + 1) ** p - 1))
        assert PebbleConfig.decode(idx, n, p).encode(n) == idx

    def test_too_many_pairs(self):
        with pytest.raises(ValueError):
            PebbleConfig.parse("1,1;2,2;3,3", 2)


class TestWinningCondition:
    def test_empty_board(self, d8, q8):
        for v in ("I", "II"):
            assert not pebble.winning_condition(d8, q8, PebbleConfig.empty(2), v)

    def test_order_mismatch_version_two(self):
        c4, v4 = catalog.get("C4"), catalog.get("C2xC2")
        g = next(x for x in range(4) if c4.element_order(x) == 4)
        assert pebble.winning_condition(c4, v4, PebbleConfig.from_tuples([g], [1], 1), "II")

    def test_identity_pairing(self, d8):
        board = PebbleConfig.from_tuples([1, 2], [1, 2], 2)
        for v in ("I", "II"):
            assert not pebble.winning_condition(d8, d8, board, v)

    def test_version_one_ignores_partial_boards(self):
        c4, v4 = catalog.get("C4"), catalog.get("C2xC2")
        g = next(x for x in range(4) if c4.element_order(x) == 4)
        assert not pebble.winning_condition(c4, v4, PebbleConfig.from_tuples([g], [1], 2), "I")


class TestSolve:
    def test_same_group(self, d8):
        for v in ("I", "II"):
            assert pebble.solve_game(d8, d8, 2, v).winner == "Duplicator"

    def test_c4_v4(self):
        assert pebble.solve_game(catalog.get("C4"), catalog.get("C2xC2"), 2, "I").winner == "Spoiler"

    def test_c6_s3(self):
        assert pebble.solve_game(catalog.get("C6"), catalog.get("S3"), 2, "II").winner == "Spoiler"

    def test_caps(self):
        big = catalog.get("C13")
        with pytest.raises(CapExceeded):
            pebble.solve_game(big, big, 2)
        with pytest.raises(CapExceeded):
            pebble.GameSolver(catalog.get("C2"), catalog.get("C2"), 5)

    @pytest.mark.parametrize("a,b", [("C4", "C2xC2"), ("C4", "C4"), ("C3", "C3"), ("C2xC2", "C2xC2")])
    @pytest.mark.parametrize("version", ["I", "II"])
    def test_matches_brute_force(self, a, b, version):
        g, h = catalog.get(a), catalog.get(b)
        for p in (2, 3):
            W = pebble.GameSolver(g, h, p, version).solve()[0]
            assert set(np.flatnonzero(W).tolist()) == brute_force_game(g, h, p, version)

    @pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
    def test_backends_agree(self, d8, q8):
        prev = kernels.backend()
        try:
            kernels.set_backend("numba")
            a = pebble.GameSolver(d8, q8, 3, "I").solve()[0]
            kernels.set_backend("numpy")
            b = pebble.GameSolver(d8, q8, 3, "I").solve()[0]
        finally:
            kernels.set_backend(prev)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("a,b", [(a.name, b.name) for a, b in catalog.same_order_pairs(8)])
    def test_agrees_with_wl_on_empty_board(self, a, b):
        g, h = catalog.get(a), catalog.get(b)
        for v in ("I", "II"):
            game = pebble.solve_game(g, h, 2, v).winner == "Duplicator"
            assert game == wl.joint_compare(g, h, 2, v).equivalent

    def test_forced_edges(self, d8):
        copy = d8.relabel([0, 3, 1, 7, 2, 6, 4, 5])
        solver = pebble.GameSolver(d8, copy, 3, "II")
        from groupwl.isomorphism import find_isomorphism
        phi = find_isomorphism(d8, copy)
        for x in range(1, 8):
            cfg = PebbleConfig.from_tuples([x], [int(phi[x])], 3)
            assert not solver.spoiler_wins(cfg)
            f = solver.duplicator_bijection(cfg, 2)
            assert f is not None and f[x] == phi[x]
            assert sorted(f.tolist()) == list(range(8))


class TestEquivalence:
    def test_trivial(self):
        c1 = catalog.get("C1")
        assert pebble.check_game_wl_equivalence(c1, c1, 2, "II").holds

    @pytest.mark.parametrize("a,b", [("D8", "Q8"), ("C4", "C2xC2"), ("S3", "C6")])
    def test_holds(self, a, b):
        for v in ("I", "II"):
            assert pebble.check_game_wl_equivalence(catalog.get(a), catalog.get(b), 2, v).holds

    def test_fault_injection(self, d8):
        v = wl.joint_refine([d8, d8], 2, "II")
        cg, ch = (c.colors.copy() for c in v.colorings)
        ch[5] = ch.max() + 1
        rep = pebble.check_game_wl_equivalence(d8, d8, 2, "II", colors=(cg, ch))
        assert not rep.holds
        assert any(m[1] == (0, 5) for m in rep.mismatches)


class TestChains:
    def test_trivial_chain_same_winner(self, d8, q8):
        for g, h in ((d8, d8), (d8, q8)):
            plain = pebble.GameSolver(g, h, 3, "II").result().winner
            chained = pebble.chain_respecting_mode(g, h, [[0]], [[0]], 3, "II").result().winner
            assert plain == chained

    def test_c4_chain(self):
        c4 = catalog.get("C4")
        chain = [[0], sorted(c4.generated_subgroup([c4.power(1, 2)]))]
        res = pebble.chain_respecting_mode(c4, c4, chain, chain, 2, "II").result()
        assert res.winner == "Duplicator"

    def test_c4_v4_chain(self):
        c4, v4 = catalog.get("C4"), catalog.get("C2xC2")
        squares = sorted({c4.power(x, 2) for x in range(4)})
        res = pebble.chain_respecting_mode(c4, v4, [squares], [[0, 1]], 2, "II").result()
        assert res.winner == "Spoiler"

    @pytest.mark.parametrize("a,b", [("D8", "D8"), ("D8", "Q8"), ("C4xC2", "C4xC2")])
    def test_monotone(self, a, b):
        g, h = catalog.get(a), catalog.get(b)
        zg, zh = sorted(g.center()), sorted(h.center())
        plain = pebble.GameSolver(g, h, 2, "II").solve()[0]
        chained = pebble.chain_respecting_mode(g, h, [zg], [zh], 2, "II").solve()[0]
        assert np.all(chained[plain])

    def test_equal_colors_mean_duplicator_wins(self, d8):
        copy = d8.relabel([0, 3, 1, 7, 2, 6, 4, 5])
        assert pebble.GameSolver(d8, copy, 3, "II").result().winner == "Duplicator"
        zc = sorted(copy.center())
        chained = pebble.chain_respecting_mode(d8, copy, [sorted(d8.center())], [zc], 2, "II")
        assert chained.result().winner == "Duplicator"


class TestRepresentatives:
    def test_singletons(self):
        systems = pebble.representative_decomposition([2, 0, 1], [0, 1, 2], [0, 1, 2])
        assert len(systems) == 1 and systems[0].tolist() == [0, 1, 2]

    def test_pairs_identity(self):
        systems = pebble.representative_decomposition([0, 1, 2, 3], [0, 0, 1, 1], [0, 1, 0, 1])
        assert len(systems) == 2
        for s in systems:
            assert pebble.is_representative_system(s, [0, 0, 1, 1])

    @given(st.permutations(range(12)), st.permutations(range(12)))
    @settings(max_examples=30)
    def test_random_twelve(self, f, shuffle):
        p = [i % 3 for i in range(12)]
        q = [shuffle[i] % 3 for i in range(12)]
        systems = pebble.representative_decomposition(f, p, q)
        assert len(systems) == 4
        flat = np.concatenate(systems)
        assert sorted(flat.tolist()) == list(range(12))
        fa = np.asarray(f)
        for s in systems:
            assert pebble.is_representative_system(s, p)
            assert pebble.is_representative_system(fa[s], q)
