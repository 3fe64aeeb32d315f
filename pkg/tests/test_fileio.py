import random

import pytest
from hypothesis import given, settings, strategies as st

from rcelect import Election, Graph, ParseError, RceInstance
from rcelect.fileio import (
    dumps_election,
    dumps_graph,
    dumps_instance,
    load_election,
    loads_election,
    loads_graph,
    loads_instance,
    save_election,
    save_graph,
    save_instance,
    load_graph,
    load_instance,
)
from conftest import random_election


class TestElectionCodec:
    def test_spec_example(self):
        election = loads_election("3 2\n0 1\n1\n")
        assert election == Election(3, [(0, 1), (1,)])

    def test_comments_and_empty_ballots(self):
        text = "# produced by hand\n3 3\n0 1\n\n# trailing comment\n2\n"
        election = loads_election(text)
        assert election.ballots == ((0, 1), (), (2,))
        assert election.allow_empty

    def test_duplicate_index(self):
        with pytest.raises(ParseError) as err:
            loads_election("3 1\n1 1\n")
        assert err.value.line == 2
        assert "duplicate" in str(err.value)

    def test_out_of_range(self):
        with pytest.raises(ParseError):
            loads_election("3 1\n0 3\n")

    def test_non_numeric(self):
        with pytest.raises(ParseError):
            loads_election("3 1\n0 x\n")
        with pytest.raises(ParseError):
            loads_election("three 1\n0\n")

    def test_descending_rejected(self):
        with pytest.raises(ParseError):
            loads_election("3 1\n1 0\n")

    def test_missing_ballots(self):
        with pytest.raises(ParseError):
            loads_election("3 2\n0\n")

    def test_extra_ballots(self):
        with pytest.raises(ParseError):
            loads_election("3 1\n0\n1\n")

    def test_round_trip_files(self, tmp_path):
        election = Election(4, [(0, 2), (1, 3), ()], allow_empty=True)
        path = tmp_path / "e.app"
        save_election(election, path)
        assert load_election(path) == election
        # canonical files survive byte-identically
        assert path.read_text() == dumps_election(election)
        save_election(load_election(path), path)
        assert path.read_text() == dumps_election(election)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_round_trip_random_elections(data):
    m = data.draw(st.integers(min_value=1, max_value=8))
    ballots = data.draw(
        st.lists(st.sets(st.integers(0, m - 1), max_size=m), min_size=1, max_size=6)
    )
    election = Election(m, [tuple(sorted(b)) for b in ballots], allow_empty=True)
    text = dumps_election(election)
    assert loads_election(text) == election
    assert dumps_election(loads_election(text)) == text


class TestInstanceCodec:
    def test_round_trip(self, tmp_path):
        inst = RceInstance(
            before=Election(4, [(0, 1), (2,)]),
            after=Election(4, [(0,), (2, 3)]),
            k=2,
            committee=(0, 2),
            ell=1,
        )
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert loaded == inst
        assert dumps_instance(loaded) == path.read_text()

    def test_missing_field(self):
        with pytest.raises(ParseError):
            loads_instance('{"k": 1}')

    def test_bad_json(self):
        with pytest.raises(ParseError):
            loads_instance("{nope")

    def test_bad_committee(self):
        text = dumps_instance(
            RceInstance(Election(3, [(0,)]), Election(3, [(1,)]), 1, (0,), 0)
        ).replace('"committee": [\n    0\n  ]', '"committee": [0, 0]')
        with pytest.raises(ParseError):
            loads_instance(text)

    def test_seed_instance_structural_checks(self):
        with pytest.raises(ParseError):
            loads_instance(
                '{"k": 2, "ell": 0, "committee": [0, 1], '
                '"before": {"m": 3, "ballots": [[0]]}, '
                '"after": {"m": 4, "ballots": [[0]]}}'
            )


class TestGraphCodec:
    def test_round_trip(self, tmp_path):
        graph = Graph(4, ((0, 1), (2, 3), (0, 3)))
        path = tmp_path / "g.txt"
        save_graph(graph, path)
        assert load_graph(path) == graph
        assert dumps_graph(load_graph(path)) == path.read_text()

    def test_parse(self):
        graph = loads_graph("# a triangle\n3\n0 1\n1 2\n0 2\n")
        assert graph == Graph(3, ((0, 1), (0, 2), (1, 2)))

    def test_errors(self):
        with pytest.raises(ParseError):
            loads_graph("")
        with pytest.raises(ParseError):
            loads_graph("3\n0\n")
        with pytest.raises(ParseError):
            loads_graph("3\n0 zero\n")
        with pytest.raises(ParseError):
            loads_graph("3\n0 0\n")
        with pytest.raises(ParseError):
            loads_graph("3\n0 5\n")


def test_round_trip_sampled_instances(tmp_path):
    rng = random.Random(99)
    for i in range(25):
        n, m = rng.randint(1, 5), rng.randint(2, 6)
        k = rng.randint(1, m)
        inst = RceInstance(
            before=random_election(rng, n, m),
            after=random_election(rng, n, m, allow_empty=True),
            k=k,
            committee=tuple(sorted(rng.sample(range(m), k))),
            ell=rng.randint(0, k),
        )
        assert loads_instance(dumps_instance(inst)) == inst
