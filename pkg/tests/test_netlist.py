from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dlmnet.dlm import Message
from dlmnet.experiments import ExperimentConfig, run_netlist
from dlmnet.network import Passive, Sink, Source, build_cnot_circuit, build_mzi
from dlmnet.netlist import NetlistError, build_network, format_netlist, parse_netlist

NETLISTS = Path(__file__).resolve().parents[1] / "netlists"
MZI = (NETLISTS / "mzi.net").read_text()

BS_HEAD = """\
source in 2
proc bs1 beamsplitter
wire in.0 -> bs1.0
wire in.1 -> bs1.1
"""


def diagnostics(text):
    with pytest.raises(NetlistError) as info:
        parse_netlist(text)
    return info.value.diagnostics


def shape(net):
    kinds = {k: type(v).__name__ for k, v in net.nodes.items()}
    return kinds, dict(net.routes), dict(net.taps), sorted(net.counters)


class TestMzi:
    def test_isomorphic_to_builder(self):
        doc = parse_netlist(MZI)
        a = build_network(doc, 0.99, "deterministic", np.random.default_rng(0),
                          np.random.default_rng(1))
        b = build_mzi(0.99, 180, 0, rng=0, slm_rng=1)
        assert shape(a) == shape(b)
        for pid in ("bs1", "bs2"):
            assert a.nodes[pid].dlm1.values.tobytes() == b.nodes[pid].dlm1.values.tobytes()
            assert a.nodes[pid].transform.matrix.tobytes() == b.nodes[pid].transform.matrix.tobytes()
        for rid in ("r0", "r1"):
            np.testing.assert_array_equal(a.nodes[rid].transform.matrix, b.nodes[rid].transform.matrix)

    def test_same_counts_as_builder(self):
        doc = parse_netlist(MZI)
        a = build_network(doc, 0.99, "deterministic", np.random.default_rng(0),
                          np.random.default_rng(1))
        b = build_mzi(0.99, 180, 0, rng=0, slm_rng=1)
        rng = np.random.default_rng(2)
        for psi in rng.uniform(0, 2 * np.pi, 3000):
            msg = Message(0, [np.cos(psi), np.sin(psi)])
            a.route(msg, "in")
            b.route(msg, "in")
        assert a.counters == b.counters

    def test_params(self):
        assert parse_netlist(MZI).params == {"alpha": 0.99, "mode": "deterministic"}

    def test_run(self):
        r = run_netlist(parse_netlist(MZI), ExperimentConfig(events_per_point=1000))
        assert r.labels == ("N2", "N3", "N0", "N1")
        assert r.groups == ((0, 1), (2, 3))
        assert sum(r.counts[:2]) == 1000 and sum(r.counts[2:]) == 1000


def test_cnot_netlist_matches_builder():
    doc = parse_netlist((NETLISTS / "cnot_circuit.net").read_text())
    a = build_network(doc, 0.99, "deterministic", np.random.default_rng(5),
                      np.random.default_rng(6))
    b = build_cnot_circuit(0.99, rng=5, slm_rng=6)
    assert shape(a) == shape(b)
    msg = Message(3, [1.0, 0.0])
    for _ in range(300):
        assert a.route(msg, "in")[0] == b.route(msg, "in")[0]


class TestDiagnostics:
    def test_empty(self):
        (d,) = diagnostics("")
        assert str(d) == "1:1: no source declared"

    def test_comments_only(self):
        assert [d.message for d in diagnostics("# nothing\n\n")] == ["no source declared"]

    def test_self_wire_cycle(self):
        text = MZI.replace("wire r0.0 -> bs2.0", "wire r0.0 -> bs2.0\nwire bs1.0 -> bs1.0") \
            .replace("wire bs1.0 -> r0.0\n", "")
        ds = diagnostics(text)
        cyc = [d for d in ds if "cycle" in d.message]
        assert len(cyc) == 1
        assert cyc[0].line == text.splitlines().index("wire bs1.0 -> bs1.0") + 1

    def test_cycle_through_passives(self):
        text = ("source in 1\npassive a rotation 0\npassive b rotation 0\n"
                "wire in.0 -> a.0\nwire a.0 -> b.0\nwire b.0 -> a.0\n")
        ds = diagnostics(text)
        assert any("cycle" in d.message and d.line in (5, 6) for d in ds)

    def test_duplicate_id(self):
        ds = diagnostics(BS_HEAD + "proc bs1 cnot\nsink a from bs1.0\nsink b from bs1.1\n")
        assert any(d.line == 5 and "duplicate id 'bs1'" in d.message for d in ds)

    def test_dangling_wire(self):
        ds = diagnostics(BS_HEAD + "wire bs1.0 -> nowhere.0\nsink b from bs1.1\n")
        assert any(d.line == 5 and "undeclared node 'nowhere'" in d.message for d in ds)

    def test_dimension_mismatch(self):
        text = BS_HEAD + ("passive m matrix 3 1 0 0 0 1 0 0 0 1\n"
                          "wire bs1.0 -> m.0\nsink a from m.0\nsink b from bs1.1\n")
        ds = diagnostics(text)
        assert any(d.line == 6 and "dimension mismatch" in d.message for d in ds)

    def test_event_type_mismatch(self):
        text = BS_HEAD + ("proc c cnot\nwire bs1.0 -> c.0\nwire bs1.1 -> c.1\n"
                          + "".join(f"sink s{k} from c.{k}\n" for k in range(4)))
        assert any("event types" in d.message for d in diagnostics(text))

    def test_unwired_output(self):
        ds = diagnostics(BS_HEAD + "sink a from bs1.0\n")
        assert any(d.line == 2 and "bs1.1 is not wired" in d.message for d in ds)

    def test_port_range(self):
        ds = diagnostics(BS_HEAD + "sink a from bs1.0\nsink b from bs1.1\nsink c from bs1.2\n")
        assert any(d.line == 7 and "no output channel 2" in d.message for d in ds)

    def test_syntax_column(self):
        (d,) = diagnostics("source in two\n")
        assert (d.line, d.column) == (1, 11)

    def test_unknown_statement(self):
        (d,) = diagnostics("frobnicate x\n")
        assert "unknown statement" in d.message and d.column == 1

    def test_missing_arrow(self):
        ds = diagnostics("source in 1\nwire in.0 bs.0\n")
        assert (ds[0].line, ds[0].column, ds[0].message) == (2, 11, "expected '->'")

    def test_bad_alpha(self):
        (d,) = diagnostics("param alpha 1.5\n")
        assert "alpha" in d.message

    def test_non_orthogonal_matrix(self):
        (d,) = diagnostics("passive m matrix 2 1 1 0 1\n")
        assert "not orthogonal" in d.message

    def test_payload_not_unit(self):
        (d,) = diagnostics("input in.0 weight 1 payload 1 1\n")
        assert "unit" in d.message

    def test_input_must_name_source(self):
        ds = diagnostics(BS_HEAD + "sink a from bs1.0\nsink b from bs1.1\ninput bs1.0 weight 1 phase 0\n")
        assert any("must name a source" in d.message for d in ds)

    def test_errors_are_sorted(self):
        ds = diagnostics("bogus\nsource in x\nalso bogus\n")
        assert [d.line for d in ds] == [1, 2, 3]


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["mzi.net", "cnot_circuit.net"])
    def test_files(self, name):
        doc = parse_netlist((NETLISTS / name).read_text())
        again = parse_netlist(format_netlist(doc))
        assert again == doc
        assert format_netlist(again) == format_netlist(doc)

    @given(st.floats(-720, 720, allow_nan=False), st.floats(0, 1e6, allow_nan=False),
           st.floats(0.01, 0.99))
    def test_numbers_survive(self, phi, w, alpha):
        text = (f"param alpha {alpha!r}\nsource in 1\npassive r rotation {phi!r}\n"
                f"wire in.0 -> r.0\nsink s from r.0\ninput in.0 weight {w!r} phase {phi!r}\n")
        doc = parse_netlist(text)
        assert parse_netlist(format_netlist(doc)) == doc

    def test_matrix_kinds(self):
        c, s = float(np.cos(0.3)), float(np.sin(0.3))
        text = ("source in 2\n"
                f"proc p matrix 2 1 {c!r} {-s!r} {s!r} {c!r}\n"
                "wire in.0 -> p.0\nwire in.1 -> p.1\n"
                "sink a from p.0\nsink b from p.1\ninput in.1 weight 2 payload 1.0\n")
        doc = parse_netlist(text)
        assert parse_netlist(format_netlist(doc)) == doc
        net = build_network(doc, 0.9, "deterministic", np.random.default_rng(0),
                            np.random.default_rng(0))
        assert net.nodes["p"].message_len == 1


def test_node_kinds():
    net = build_network(parse_netlist(MZI), 0.99, "deterministic", np.random.default_rng(0),
                        np.random.default_rng(0))
    assert sorted(net.of_kind(Passive)) == ["r0", "r1"]
    assert net.of_kind(Source) == ["in"]
    assert sorted(net.of_kind(Sink)) == ["N2", "N3"]
