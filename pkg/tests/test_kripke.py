import random

import pytest

import helpers
from ctlinfer import kripke
from ctlinfer.kripke import KripkeStructure


def small(**overrides):
    base = dict(
        props=["p", "q"], states=["s0", "s1"], init=["s0"],
        labels={"s0": ["p"], "s1": ["q"]},
        trans={"s0": ["s1"], "s1": ["s1"]})
    base.update(overrides)
    return kripke.validate(**base)


class TestValidate:
    def test_accepts_well_formed(self):
        m = small()
        assert m.size == 2
        assert m.post(0) == frozenset({1})
        assert m.labels[1] == frozenset({"q"})
        assert m.index("s1") == 1

    def test_missing_labels_default_empty(self):
        m = small(labels={})
        assert all(label == frozenset() for label in m.labels)

    def test_rejects_non_total(self):
        with pytest.raises(kripke.NonTotalTransition) as err:
            small(trans={"s0": ["s1"]})
        assert err.value.state == "s1"

    def test_rejects_empty_init(self):
        with pytest.raises(kripke.EmptyInitial):
            small(init=[])

    def test_rejects_unknown_state(self):
        with pytest.raises(kripke.UnknownState):
            small(init=["nope"])
        with pytest.raises(kripke.UnknownState):
            small(trans={"s0": ["s1"], "s1": ["zz"]})

    def test_rejects_unknown_proposition(self):
        with pytest.raises(kripke.UnknownProposition):
            small(labels={"s0": ["r"]})

    def test_rejects_duplicates(self):
        with pytest.raises(kripke.InvalidStructure):
            small(states=["s0", "s0"])
        with pytest.raises(kripke.InvalidStructure):
            small(props=["p", "p"])

    def test_rejects_reserved_proposition_names(self):
        for name in ("EX", "true", "U", "AG"):
            with pytest.raises(kripke.InvalidStructure):
                small(props=["p", name], labels={})

    def test_rejects_bad_identifiers(self):
        with pytest.raises(kripke.InvalidStructure):
            small(props=["p-q"], labels={})


class TestParse:
    def test_fixture_corpus_roundtrips(self):
        names = helpers.fixture_names()
        assert len(names) >= 10
        for name in names:
            m = helpers.load_fixture(name)
            assert kripke.parse_kripke(kripke.print_kripke(m)) == m

    def test_comments_and_blank_lines(self):
        text = """
        # leading comment
        kripke
        props: p   # trailing comment
        states: s0
        init: s0

        labels: s0: p
        trans: s0 -> s0
        """
        m = kripke.parse_kripke(text)
        assert m.labels[0] == frozenset({"p"})

    def test_empty_label_entries(self):
        m = kripke.parse_kripke(
            "kripke\nprops: p\nstates: a b\ninit: a\n"
            "labels: a: ; b:\ntrans: a -> b ; b -> a")
        assert m.labels == (frozenset(), frozenset())

    def test_missing_section_fails(self):
        with pytest.raises(kripke.ParseError):
            kripke.parse_kripke("kripke\nprops: p\nstates: s0\ninit: s0\n"
                                "trans: s0 -> s0")

    def test_wrong_header_fails(self):
        with pytest.raises(kripke.ParseError) as err:
            kripke.parse_kripke("kripk\nprops:\nstates: s0\ninit: s0\n"
                                "labels:\ntrans: s0 -> s0")
        assert err.value.line == 1

    def test_duplicate_entry_fails(self):
        with pytest.raises(kripke.ParseError) as err:
            kripke.parse_kripke(
                "kripke\nprops: p\nstates: s0\ninit: s0\n"
                "labels: s0: p ; s0: p\ntrans: s0 -> s0")
        assert err.value.line == 5

    def test_missing_arrow_fails(self):
        with pytest.raises(kripke.ParseError):
            kripke.parse_kripke(
                "kripke\nprops: p\nstates: s0\ninit: s0\n"
                "labels: s0: p\ntrans: s0 s0")

    def test_trailing_content_fails(self):
        with pytest.raises(kripke.ParseError) as err:
            kripke.parse_kripke(
                "kripke\nprops: p\nstates: s0\ninit: s0\n"
                "labels: s0: p\ntrans: s0 -> s0\nextra")
        assert err.value.line == 7

    def test_random_roundtrip(self):
        rng = random.Random(404)
        for _ in range(150):
            m = helpers.random_kripke(rng, max_states=5)
            assert kripke.parse_kripke(kripke.print_kripke(m)) == m


def test_inline_is_single_line():
    m = helpers.load_fixture("two_state_pq.kripke")
    line = kripke.inline_kripke(m)
    assert "\n" not in line
    assert line.startswith("kripke / props: p q / ")


class TestIsomorphic:
    def test_relabeled_states(self):
        a = small()
        b = kripke.validate(
            props=["p", "q"], states=["x1", "x0"], init=["x0"],
            labels={"x0": ["p"], "x1": ["q"]},
            trans={"x0": ["x1"], "x1": ["x1"]})
        assert kripke.isomorphic(a, b)

    def test_detects_difference(self):
        a = small()
        b = small(trans={"s0": ["s0"], "s1": ["s1"]})
        assert not kripke.isomorphic(a, b)

    def test_label_names_matter(self):
        a = small()
        b = kripke.validate(
            props=["p", "q"], states=["s0", "s1"], init=["s0"],
            labels={"s0": ["q"], "s1": ["p"]},
            trans={"s0": ["s1"], "s1": ["s1"]})
        assert not kripke.isomorphic(a, b)

    def test_initial_states_matter(self):
        a = small()
        b = small(init=["s0", "s1"])
        assert not kripke.isomorphic(a, b)

    def test_invariant_under_permutation_random(self):
        rng = random.Random(77)
        for _ in range(50):
            m = helpers.random_kripke(rng, max_states=4)
            perm = list(range(m.size))
            rng.shuffle(perm)
            renamed = KripkeStructure(
                alphabet=m.alphabet,
                state_names=tuple(f"t{i}" for i in range(m.size)),
                initial=frozenset(perm[s] for s in m.initial),
                labels=tuple(m.labels[perm.index(s)]
                             for s in range(m.size)),
                successors=tuple(
                    frozenset(perm[t] for t in m.successors[perm.index(s)])
                    for s in range(m.size)),
            )
            assert kripke.isomorphic(m, renamed)
