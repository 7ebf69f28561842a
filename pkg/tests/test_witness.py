import json
import random
from fractions import Fraction
from importlib import resources

import mpmath
import pytest

import golden
from hopfnet.caseprover import g1r_extreme_matrix
from hopfnet.conecalc import ExtremeMatrix, extreme_rays
from hopfnet.fixtures import fixture
from hopfnet.netmodel import motif_by_label, stoichiometric_matrix
from hopfnet.spectral import convex_model
from hopfnet.witness import (
    WitnessPoint,
    calcium_hl_from_t,
    calcium_image_membership,
    calcium_phi,
    calcium_t,
    damped_newton_steady_state,
    in_P,
    in_P_prime,
    mass_action_jacobian,
    mass_action_rhs,
    motif_pair,
    phi_map,
    pure_imaginary_divisor,
    realize_parameters,
    reduced_char_poly_at,
    spectrum,
    spectrum_of_matrix,
    transport_identities,
    transport_trials,
    verify_charpoly_transport,
)


@pytest.fixture(scope="module")
def proc_pair():
    net = fixture("processive")
    return motif_pair(net, motif_by_label(net, "k2"))


@pytest.fixture(scope="module")
def g1_pair():
    net = fixture("g1")
    return motif_pair(net, motif_by_label(net, "k10"))


def example_inputs(pair):
    h = pair.h_from_original(golden.decimals(golden.PROC_H))
    l = pair.l_from_columns(golden.decimals(golden.PROC_L), golden.PROC_E_COLUMNS)
    return h, l


# ---------------------------------------------------------------- realization and Jacobians

def test_realized_point_is_steady_and_jacobian_matches():
    net = fixture("g1r")
    E = g1r_extreme_matrix()
    model = convex_model(net, E)
    rng = random.Random(1)
    for _ in range(3):
        h = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(net.n_species)]
        l = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(E.m)]
        w = realize_parameters(net, E, h, l)
        assert all(v == 0 for v in mass_action_rhs(net, w.kappa, w.x))
        pt = {f"h{i + 1}": v for i, v in enumerate(h)} | {f"l{j + 1}": v for j, v in enumerate(l)}
        want = [[e.eval(pt) for e in row] for row in model.J.entries]
        assert mass_action_jacobian(net, w.kappa, w.x) == want


def test_all_ones_point():
    net = fixture("calcium")
    E = extreme_rays(stoichiometric_matrix(net))
    w = realize_parameters(net, E, [1] * 4, [1] * E.m)
    assert w.x == (1, 1, 1, 1)
    assert all(v == 0 for v in mass_action_rhs(net, w.kappa, w.x))


def test_witness_point_rejects_nonpositive():
    with pytest.raises(ValueError):
        WitnessPoint((1, 0), (1, 1))


def test_realize_rejects_zero_row():
    net = fixture("processive_irreversible")
    E = extreme_rays(stoichiometric_matrix(net))
    bad = ExtremeMatrix(E.columns[:0], E.source_rank, E.n_reactions)
    with pytest.raises(ValueError):
        realize_parameters(net, bad, [1] * net.n_species, [])


# ---------------------------------------------------------------- spectra

def test_spectrum_counts_structural_zeros():
    net = fixture("g1r")
    E = g1r_extreme_matrix()
    w = realize_parameters(net, E, [1] * net.n_species, [1] * E.m)
    rep = spectrum(net, w, tol=1e-20)
    assert rep.near_zero == rep.expected_zero == net.n_species - 5
    assert rep.near_zero + rep.negative_real + rep.positive_real + 2 * rep.pure_imaginary_pairs == net.n_species


def test_spectrum_of_rotation():
    rep = spectrum_of_matrix([[0, -2], [2, 0]])
    assert rep.pure_imaginary_pairs == 1
    assert max(rep.error_bounds) < 1e-40
    assert json.dumps(rep.to_json())


def test_calcium_witness_is_exact_hopf_point():
    net = fixture("calcium_reduced")
    kappa, x = golden.CALCIUM_WITNESS_KAPPA, golden.CALCIUM_WITNESS_X
    assert all(v == 0 for v in mass_action_rhs(net, kappa, x))
    cp = reduced_char_poly_at(net, kappa, x)
    omega2 = pure_imaginary_divisor(cp)
    assert omega2 is not None and omega2 > 0
    rep = spectrum(net, WitnessPoint(tuple(kappa), tuple(x)))
    assert rep.pure_imaginary_pairs == 1
    assert abs(rep.min_pair_real_part()) < 1e-40


def test_pure_imaginary_divisor_negative():
    # (z + 1)(z^2 + z + 1) has no roots on the imaginary axis
    assert pure_imaginary_divisor([Fraction(1), Fraction(2), Fraction(2), Fraction(1)]) is None
    # (z + 3)(z^2 + 4)
    assert pure_imaginary_divisor([Fraction(1), Fraction(3), Fraction(4), Fraction(12)]) == 4


def test_processive_decimals_give_near_imaginary_pair():
    net = fixture("processive")
    w = WitnessPoint(tuple(golden.PROC_KAPPA), tuple(golden.PROC_X))
    rep = spectrum(net, w, tol=1e-3)
    assert rep.pure_imaginary_pairs == 1
    assert rep.min_pair_real_part() < 1e-3


# ---------------------------------------------------------------- phi

def test_phi_reproduces_example(proc_pair):
    h, l = example_inputs(proc_pair)
    res = phi_map(proc_pair, h, l)
    assert res.ok and proc_pair.delta == 0
    hp = proc_pair.h_to_original(res.floats())
    for got, want in zip(hp, golden.PROC_H_PRIME):
        assert abs(got - want) < 5e-5
    # l' against the printed columns with k2 removed
    labels = proc_pair.reduced.labels
    orig = fixture("processive").labels
    printed = [{orig[j]: v for j, v in enumerate(c) if v and orig[j] != "k2"} for c in golden.PROC_E_COLUMNS[:3]]
    ours = [{labels[j]: v for j, v in enumerate(c) if v} for c in proc_pair.E_reduced.columns]
    for col, want in zip(printed, golden.PROC_L_PRIME):
        assert abs(float(res.l_prime[ours.index(col)]) - want) < 5e-5
    assert all(transport_identities(proc_pair, h, l, res).values())


def test_phi_example_charpoly_exact(proc_pair):
    h, l = example_inputs(proc_pair)
    ok, _ = verify_charpoly_transport(proc_pair, h, l)
    assert ok


def test_phi_fixes_points_without_the_cycle(proc_pair, g1_pair):
    """With l_m = 0 the reduced parameters keep h unchanged."""
    rng = random.Random(7)
    for pair in (proc_pair, g1_pair):
        h = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(pair.full.n_species)]
        l = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(pair.E.m - 1)] + [Fraction(0)]
        res = phi_map(pair, h, l)
        assert res.ok
        assert res.h_prime == h


def test_gamma1_is_never_negative(proc_pair, g1_pair):
    """gamma1 >= (A - C)^2 with A, C the two halves of Lambda, so phi is defined everywhere."""
    rng = random.Random(3)
    for pair in (proc_pair, g1_pair):
        for _ in range(300):
            h = [Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(pair.full.n_species)]
            l = [Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(pair.E.m)]
            res = phi_map(pair, h, l)
            assert res.gamma1 >= 0 and res.ok


@pytest.mark.parametrize("which", ["proc", "g1"])
def test_transport_random(which, proc_pair, g1_pair):
    pair = proc_pair if which == "proc" else g1_pair
    rep = transport_trials(pair, 15, seed=11)
    assert rep.ok


def test_inclusion_and_structure(proc_pair, g1_pair):
    for pair in (proc_pair, g1_pair):
        assert pair.structure_holds()
        assert pair.inclusion_identity()


def test_motif_pair_rejects_failing_motif():
    net = fixture("calcium")
    with pytest.raises(ValueError):
        motif_pair(net, motif_by_label(net, "k5"))


# ---------------------------------------------------------------- calcium image

def test_calcium_coordinates_round_trip():
    rng = random.Random(5)
    t = [Fraction(rng.randint(1, 40), rng.randint(1, 40)) for _ in range(6)]
    h, l = calcium_hl_from_t(t, Fraction(3, 2))
    assert calcium_t(h, l) == t
    b = calcium_phi(t)
    assert in_P(b) and in_P_prime(b)


def test_calcium_phi_equals_charpoly():
    model = convex_model(fixture("calcium"), ExtremeMatrix(tuple(golden.CALCIUM_E_COLUMNS), 3, 6))
    rng = random.Random(8)
    h = [Fraction(rng.randint(1, 40), rng.randint(1, 40)) for _ in range(4)]
    l = [Fraction(rng.randint(1, 40), rng.randint(1, 40)) for _ in range(3)]
    pt = {f"h{i + 1}": v for i, v in enumerate(h)} | {f"l{j + 1}": v for j, v in enumerate(l)}
    assert model.charpoly.eval(pt)[1:] == list(calcium_phi(calcium_t(h, l)))


def test_boundary_stratum():
    b = [Fraction(3), Fraction(4), Fraction(1)]
    assert not in_P(b) and in_P_prime(b)
    assert not in_P_prime([Fraction(3), Fraction(3), Fraction(1)])


def test_membership_sampler():
    rep = calcium_image_membership(200, seed=2)
    assert rep.ok
    with pytest.raises(ValueError):
        calcium_image_membership(0)


# ---------------------------------------------------------------- irreversible processive witness

def test_irreversible_fixture_reverifies():
    net = fixture("processive_irreversible")
    doc = json.loads(resources.files("hopfnet.fixtures").joinpath("irreversible_hopf.json").read_text())
    kappa = [Fraction(k) for k in doc["kappa"]]
    with mpmath.workdps(50):
        x = [mpmath.mpf(v) for v in doc["x"]]
        f = mass_action_rhs(net, [mpmath.mpf(k.numerator) / k.denominator for k in kappa], x)
        assert max(abs(v) for v in f) < 1e-25
    # Newton from a perturbation re-converges to the same state in the same class
    x0 = [v * (1 + mpmath.mpf((-1) ** i) / 20) for i, v in enumerate(x)]
    nr = damped_newton_steady_state(net, kappa, x0, doc["totals"], precision=50)
    assert nr.converged
    assert max(abs(a - b) for a, b in zip(nr.x, x)) < 1e-25
    rep = spectrum(net, WitnessPoint(tuple(kappa), tuple(nr.x)), tol=1e-20, zero_tol=1e-20)
    assert rep.pure_imaginary_pairs == 1
    assert rep.near_zero == rep.expected_zero
    assert rep.positive_real == 0
