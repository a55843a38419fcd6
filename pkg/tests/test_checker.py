import random

import pytest

import helpers
from ctlinfer import checker, ctl, kripke


def sat_names(m, text):
    got = checker.sat_set(m, ctl.enf(ctl.parse_ctl(text), m.alphabet))
    return {m.state_names[s] for s in got.states}


class TestSatSet:
    def test_hand_computed_on_fixtures(self):
        m = helpers.load_fixture("mutex.kripke")
        assert sat_names(m, "c") == {"crit"}
        assert sat_names(m, "EX r") == {"idle", "req"}
        assert sat_names(m, "E[r U c]") == {"req", "crit"}
        assert sat_names(m, "EG !c") == {"idle"}
        assert sat_names(m, "AG (r -> AF c)") == {"idle", "req", "crit"}
        assert sat_names(m, "A[!c U r]") == {"req", "crit"}

    def test_diamond(self):
        m = helpers.load_fixture("diamond.kripke")
        assert sat_names(m, "EX (p & q)") == {"s1", "s2", "s3"}
        assert sat_names(m, "AF (p & q)") == {"s0", "s1", "s2", "s3"}
        assert sat_names(m, "EG p") == {"s1", "s3"}

    def test_matches_naive_oracle(self):
        rng = random.Random(99)
        for _ in range(150):
            m = helpers.random_kripke(rng, max_states=5)
            f = ctl.enf(helpers.random_ctl(rng, m.alphabet, depth=3),
                        m.alphabet)
            assert checker.sat_set(m, f).states == helpers.naive_sat(m, f)

    def test_requires_enf(self):
        m = helpers.load_fixture("selfloop_p.kripke")
        with pytest.raises(ctl.NotInEnf):
            checker.sat_set(m, ctl.parse_ctl("AX p"))

    def test_unknown_proposition(self):
        m = helpers.load_fixture("selfloop_p.kripke")
        with pytest.raises(kripke.UnknownProposition):
            checker.sat_set(m, ctl.parse_ctl("zz"))


class TestHolds:
    def test_accepts_sugar(self):
        m = helpers.load_fixture("mutex.kripke")
        assert checker.holds(m, ctl.parse_ctl("AG (r -> AF c)"))
        assert not checker.holds(m, ctl.parse_ctl("AF c"))

    def test_all_initial_states_required(self):
        m = helpers.load_fixture("two_init.kripke")
        assert checker.holds(m, ctl.parse_ctl("p | q"))
        assert not checker.holds(m, ctl.parse_ctl("p"))
        assert not checker.holds(m, ctl.parse_ctl("q"))

    def test_constants(self):
        m = helpers.load_fixture("selfloop_empty.kripke")
        assert checker.holds(m, ctl.TRUE)
        assert not checker.holds(m, ctl.FALSE)
        assert checker.holds(m, ctl.parse_ctl("EG true"))

    def test_matches_naive_on_full_grammar(self):
        rng = random.Random(100)
        for _ in range(150):
            m = helpers.random_kripke(rng, max_states=4)
            f = helpers.random_ctl(rng, m.alphabet, depth=3)
            assert checker.holds(m, f) == helpers.naive_holds(m, f)


class TestSatSetTable:
    def test_children_first_and_complete(self):
        m = helpers.load_fixture("mutex.kripke")
        f = ctl.enf(ctl.parse_ctl("E[r U c] | EX c"), m.alphabet)
        table = checker.sat_set_table(m, f)
        assert set(table) == ctl.subformulas(f)
        seen = set()
        for sub in table:
            assert all(child in seen for child in ctl.children(sub))
            seen.add(sub)

    def test_shared_cache_stays_consistent(self):
        rng = random.Random(101)
        m = helpers.random_kripke(rng, max_states=4)
        cache = {}
        for _ in range(30):
            f = ctl.enf(helpers.random_ctl(rng, m.alphabet, depth=3),
                        m.alphabet)
            table = checker.sat_set_table(m, f, cache=cache)
            for sub, states in table.items():
                assert states == helpers.naive_sat(m, sub)


class TestIterates:
    def fixed_sets(self, m, phi_text, psi_text=None):
        phi = checker.sat_set(m, ctl.parse_ctl(phi_text)).states
        psi = (checker.sat_set(m, ctl.parse_ctl(psi_text)).states
               if psi_text else None)
        return phi, psi

    def test_eu_matches_prefix_semantics(self):
        rng = random.Random(102)
        for _ in range(60):
            m = helpers.random_kripke(rng, max_states=4)
            phi, psi = self.fixed_sets(m, "p", "q")
            steps = checker.eu_iterates(m, phi, psi)
            assert steps[0] == psi
            for k, level in enumerate(steps, start=1):
                assert level == helpers.eu_prefix(m, phi, psi, k)
            full = checker.sat_set(
                m, ctl.parse_ctl("E[p U q]")).states
            assert steps[-1] == full

    def test_eg_matches_prefix_semantics(self):
        rng = random.Random(103)
        for _ in range(60):
            m = helpers.random_kripke(rng, max_states=4)
            phi, _ = self.fixed_sets(m, "p")
            steps = checker.eg_iterates(m, phi)
            assert steps[0] == phi
            for k, level in enumerate(steps, start=1):
                assert level == helpers.eg_prefix(m, phi, k)
            full = checker.sat_set(m, ctl.parse_ctl("EG p")).states
            assert steps[-1] == full

    def test_monotone_and_stabilized(self):
        rng = random.Random(104)
        for _ in range(40):
            m = helpers.random_kripke(rng, max_states=5)
            phi, psi = self.fixed_sets(m, "p | q", "q")
            eu = checker.eu_iterates(m, phi, psi)
            assert all(a <= b for a, b in zip(eu, eu[1:]))
            assert len(eu) <= m.size + 1
            eg = checker.eg_iterates(m, phi)
            assert all(b <= a for a, b in zip(eg, eg[1:]))
            assert len(eg) <= m.size + 1
