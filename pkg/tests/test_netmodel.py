import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfnet.fixtures import fixture, resolve_network
from hopfnet.netmodel import (
    Network,
    ParseError,
    catalysts,
    check_assumptions,
    find_motifs,
    motif_by_label,
    parse_network,
    permute,
    product_matrix,
    reactant_matrix,
    remove_backward,
    reorder_motif_last,
    stoichiometric_matrix,
)


def test_reversible_expands_forward_first():
    net = parse_network("A + B <=> C @ kf, kb\nC -> 0")
    assert net.labels == ["kf", "kb", "k3"]
    assert net.reactions[0].reactant.as_dict() == {0: 1, 1: 1}
    assert net.reactions[1].product.as_dict() == {0: 1, 1: 1}


def test_species_header_fixes_order():
    net = parse_network("species: C, B, A\nA + B -> C")
    assert net.species_names == ["C", "B", "A"]
    assert stoichiometric_matrix(net)[:, 0].tolist() == [1, -1, -1]


def test_coefficients_and_zero_complex():
    net = parse_network("0 -> 2*X\nX + Y -> 2 Y")
    N = stoichiometric_matrix(net)
    assert N.tolist() == [[2, -1], [0, 1]]
    assert reactant_matrix(net).tolist() == [[0, 1], [0, 1]]
    assert product_matrix(net).tolist() == [[2, 0], [0, 2]]


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("A -> B\nA => B", 2, "expected '->'"),
        ("A -> B -> C", 1, "more than one arrow"),
        ("species: A\nA -> B", 2, "undeclared species"),
        ("A -> A", 1, "self-loop"),
        ("A -> B @ k1\nB -> A @ k1", 2, "duplicate label"),
        ("A <=> B @ k1", 1, "expected 2 label"),
        ("A + -> B", 1, "cannot parse term"),
        ("0*A -> B", 1, "zero stoichiometric"),
        ("A -> B\nspecies: A, B", 2, "must precede"),
    ],
)
def test_parse_errors_carry_position(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_network(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_comments_and_blank_lines():
    net = parse_network("# header\n\nA -> B   # trailing\n")
    assert net.n_reactions == 1


def test_catalysts_have_zero_rows():
    assert catalysts(fixture("g1r")) == []  # F is consumed by k8
    net = parse_network("A + K -> B + K\nB -> A")
    assert [net.species_names[i] for i in catalysts(net)] == ["K"]


def test_dsl_roundtrip(any_fixture):
    _, net = any_fixture
    again = parse_network(net.to_dsl())
    assert np.array_equal(stoichiometric_matrix(again), stoichiometric_matrix(net))
    assert np.array_equal(reactant_matrix(again), reactant_matrix(net))
    assert again.labels == net.labels


def test_json_roundtrip(any_fixture):
    _, net = any_fixture
    again = Network.from_json(net.to_json())
    assert np.array_equal(stoichiometric_matrix(again), stoichiometric_matrix(net))


def test_resolve_network_forms(tmp_path):
    p = tmp_path / "x.crn"
    p.write_text("A -> B\n")
    assert resolve_network(str(p)).n_reactions == 1
    assert resolve_network("fixtures/g1.crn").n_reactions == 10
    assert resolve_network("calcium").n_species == 4
    with pytest.raises(FileNotFoundError):
        resolve_network("no_such_network")


# ---------------------------------------------------------------- motifs and assumptions

def test_g1_motif_roles():
    net = fixture("g1")
    m = motif_by_label(net, "k10")
    rep = check_assumptions(net, m)
    assert rep.all_pass
    assert rep.delta == 1
    names = net.species_names
    assert (names[rep.x1], names[rep.x2], names[m.intermediate]) == ("S2", "F", "FS2")


def test_processive_first_motif_is_delta_zero():
    net = fixture("processive")
    m = motif_by_label(net, "k2")
    rep = check_assumptions(net, m)
    assert rep.all_pass and rep.delta == 0
    assert net.species_names[rep.x1] == "E" and net.species_names[rep.x2] == "S0"


def test_processive_other_motifs_fail():
    net = fixture("processive")
    for lab in ("k5", "k9"):
        assert not check_assumptions(net, motif_by_label(net, lab)).all_pass


def test_calcium_motif_fails_a4():
    net = fixture("calcium")
    rep = check_assumptions(net, motif_by_label(net, "k5"))
    assert rep.a1 and not rep.a4
    assert "reactant" in rep.a4.reason


def test_a5_rejects_x2_consumed_outside_when_delta_one():
    # F is consumed by an outside reaction, so it is not a catalyst there
    text = "species: S, F, FS, P\nS + F <=> FS @ k1, k2\nFS -> P + F @ k3\nF -> 0 @ k4"
    net = parse_network(text)
    rep = check_assumptions(net, find_motifs(net)[0])
    assert rep.a1 and not rep.a5


def test_a5_rejects_x2_reactant_when_delta_zero():
    text = "species: E, S, ES, P\nE + S <=> ES @ k1, k2\nES -> P @ k3\nS + P -> P + P @ k4"
    net = parse_network(text)
    reports = [check_assumptions(net, m) for m in find_motifs(net)]
    assert not any(r.all_pass for r in reports)


def test_reorder_motif_last_shape():
    net = fixture("g1")
    full, m, reo = reorder_motif_last(net, motif_by_label(net, "k10"))
    assert full.species_names[:3] == ["S2", "F", "FS2"]
    assert [full.labels[j] for j in (-3, -2, -1)] == ["k9", "k8", "k10"]
    assert (m.product, m.forward, m.backward) == (7, 8, 9)
    P, Q = reo.row_matrix(), reo.column_matrix()
    assert np.array_equal(stoichiometric_matrix(full), P @ stoichiometric_matrix(net) @ Q)


def test_remove_backward_matches_fixture():
    g1, g1r = fixture("g1"), fixture("g1r")
    red = remove_backward(g1, motif_by_label(g1, "k10"))
    assert red.labels == g1r.labels
    assert np.array_equal(stoichiometric_matrix(red), stoichiometric_matrix(g1r))


@given(st.data())
def test_permute_acts_by_matrices(data):
    net = fixture("g2")
    sp = data.draw(st.permutations(range(net.n_species)))
    rp = data.draw(st.permutations(range(net.n_reactions)))
    out = permute(net, sp, rp)
    N = stoichiometric_matrix(net)
    assert np.array_equal(stoichiometric_matrix(out), N[np.ix_(sp, rp)])
    assert out.labels == [net.labels[j] for j in rp]
