import random
from fractions import Fraction

import pytest

from trevext.bitfield import BitString
from trevext.code_extractor import CodeSpec
from trevext.entropy import Distribution, JointDistribution, flat_source
from trevext.errors import ParameterError, SizeGuardError
from trevext.harness import (
    advice_bits,
    extraction_joint,
    extractor_error,
    format_test_vector,
    hybrid_gaps,
    majority_predictor,
    max_error_flat_sources,
    parse_test_vector,
    reduction_witness,
    smoothing_robustness_check,
    weak_seed_split_check,
)
from trevext.trevisan import TrevisanInstance
from trevext.universal_hash import AdvertisedExtractor, toeplitz_extractor
from trevext.weak_design import WeakDesign


def identity_extractor(n):
    """Seedless n-bit identity map wrapped as an extractor."""
    return AdvertisedExtractor(lambda x, y: x, n, 0, n, n, Fraction(0))


def micro_instance():
    design = WeakDesign.from_sets(6, [(0, 1, 2, 3), (2, 3, 4, 5)])
    code = CodeSpec(n=4, s=2, delta=Fraction(3, 8))
    return TrevisanInstance(design, code)


# -- extractor error oracle --------------------------------------------------


def test_error_uniform_source_identity():
    ext = identity_extractor(2)
    assert extractor_error(ext, flat_source([BitString(2, v) for v in range(4)])) == 0


def test_error_point_mass_identity():
    # identity on a known input: output is a point mass, distance 1 - 2^-m
    ext = identity_extractor(2)
    assert extractor_error(ext, Distribution({BitString(2, 3): Fraction(1)})) == \
        Fraction(3, 4)


def test_error_flat_half_support():
    ext = identity_extractor(2)
    src = flat_source([BitString(2, 0), BitString(2, 1)])
    assert extractor_error(ext, src) == Fraction(1, 2)


def test_error_side_information_leak():
    # E = X: conditioned on each side symbol the output is deterministic
    ext = identity_extractor(1)
    J = JointDistribution(
        {(BitString(1, b), b): Fraction(1, 2) for b in range(2)}
    )
    assert extractor_error(ext, J) == Fraction(1, 2)


def test_error_size_guard():
    with pytest.raises(SizeGuardError):
        extractor_error(identity_extractor(13), flat_source([BitString(13, 0)]))


def test_error_matches_hybrid_total():
    inst = micro_instance()
    src = flat_source([BitString(4, 0), BitString(4, 5), BitString(4, 9)])
    err = extractor_error(inst, src)
    rep = hybrid_gaps(extraction_joint(inst, src), inst.m)
    assert rep.total == err


# -- flat-source family search -----------------------------------------------


def test_flat_family_exhaustive_identity():
    rep = max_error_flat_sources(identity_extractor(2), k=1)
    assert rep.regime == "exhaustive"
    assert rep.sources_checked == 6
    assert rep.max_error == Fraction(1, 2)


def test_flat_family_sampled_regime():
    # first-bit projection of a 6-bit input; comb(64, 8) >> exhaustive limit
    ext = AdvertisedExtractor(lambda x, y: x.prefix(1), 6, 0, 1, 3, Fraction(0))
    rep = max_error_flat_sources(ext, k=3, samples=3, hillclimb_passes=1)
    assert rep.regime == "sampled"
    # a support contained in one half-space is the worst case
    assert 0 <= rep.max_error <= Fraction(1, 2)


def test_flat_family_monotone_in_k():
    # flat sources of entropy k are the extreme points of the >= k polytope,
    # so the worst-case error cannot increase with k
    ext = identity_extractor(3)
    errs = [max_error_flat_sources(ext, k).max_error for k in range(4)]
    assert all(a >= b for a, b in zip(errs, errs[1:]))
    assert errs[3] == 0


def test_flat_family_k_exceeds_n():
    with pytest.raises(ParameterError):
        max_error_flat_sources(identity_extractor(2), k=3)


# -- hybrid decomposition ----------------------------------------------------


def test_hybrid_full_leak():
    # E is a copy of a uniform 2-bit Z
    J = JointDistribution(
        {(BitString(2, v), v): Fraction(1, 4) for v in range(4)}
    )
    rep = hybrid_gaps(J, 2)
    assert rep.total == Fraction(3, 4)
    assert rep.gaps[rep.argmax] >= Fraction(3, 8)
    assert sum(rep.gaps, Fraction(0)) >= rep.total


def test_hybrid_single_bit_gap_is_total():
    J = JointDistribution(
        {(BitString(1, 1), None): Fraction(7, 8), (BitString(1, 0), None): Fraction(1, 8)}
    )
    rep = hybrid_gaps(J, 1)
    assert rep.gaps == (rep.total,)
    assert rep.total == Fraction(3, 8)


def test_hybrid_uniform_independent_zero():
    J = JointDistribution(
        {(BitString(2, v), e): Fraction(1, 8) for v in range(4) for e in "ab"}
    )
    rep = hybrid_gaps(J, 2)
    assert rep.total == 0 and rep.gaps == (Fraction(0), Fraction(0))


def test_hybrid_random_joints_exact_bound():
    rng = random.Random(21)
    for _ in range(50):
        m = rng.randint(1, 4)
        w = {
            (BitString(m, v), e): rng.randint(0, 3)
            for v in range(1 << m)
            for e in range(2)
        }
        tot = sum(w.values())
        if tot == 0:
            continue
        J = JointDistribution({k: Fraction(v, tot) for k, v in w.items() if v})
        rep = hybrid_gaps(J, m)  # internal asserts cover the bound
        assert rep.gaps[rep.argmax] * m >= rep.total


def test_hybrid_size_guard():
    J = JointDistribution({(BitString(13, 0), None): Fraction(1)})
    with pytest.raises(SizeGuardError):
        hybrid_gaps(J, 13)


# -- reduction witness -------------------------------------------------------


def test_witness_low_entropy_source():
    inst = micro_instance()
    src = flat_source([BitString(4, 0), BitString(4, 1)])
    wit = reduction_witness(inst, src)
    assert wit.advantage >= wit.gap
    assert wit.gap * inst.m >= wit.total
    assert wit.advice_bits <= inst.design.r_certified * inst.m
    assert wit.advice_bits == advice_bits(inst, wit.index)
    assert wit.w.length == inst.d - len(inst.design.sets[wit.index])


def test_witness_point_mass():
    inst = micro_instance()
    wit = reduction_witness(inst, Distribution({BitString(4, 11): Fraction(1)}))
    assert wit.total > 0
    assert wit.advantage * inst.m >= wit.total


def test_advice_bits_formula():
    inst = micro_instance()
    assert advice_bits(inst, 0) == 0
    assert advice_bits(inst, 1) == 1 << 2  # |S_0 cap S_1| = 2


def test_witness_size_guard():
    design = WeakDesign.from_sets(10, [tuple(range(8)), tuple(range(2, 10))])
    code = CodeSpec(n=16, s=4, delta=Fraction(1, 3))
    inst = TrevisanInstance(design, code)
    with pytest.raises(SizeGuardError):
        reduction_witness(inst, Distribution({BitString(16, 0): Fraction(1)}))


# -- majority predictor ------------------------------------------------------


def test_majority_deterministic_string():
    x = BitString(4, 0b1010)
    rep = majority_predictor(Distribution({x: Fraction(1)}), 4, Fraction(1, 4))
    assert rep.alpha == x
    assert rep.advantage == Fraction(1, 2)
    assert rep.success == 1
    assert rep.premise_holds


def test_majority_uniform_premise_fails():
    P = flat_source([BitString(3, v) for v in range(8)])
    rep = majority_predictor(P, 3, Fraction(1, 8))
    assert rep.advantage == 0
    assert not rep.premise_holds


def test_majority_random_sources():
    rng = random.Random(33)
    for _ in range(100):
        nbar = rng.randint(2, 6)
        w = {BitString(nbar, v): rng.randint(0, 3) for v in range(1 << nbar)}
        tot = sum(w.values())
        if tot == 0:
            continue
        P = Distribution({k: Fraction(v, tot) for k, v in w.items() if v})
        rep = majority_predictor(P, nbar, Fraction(1, 16))
        if rep.premise_holds:  # implication asserted internally too
            assert rep.success > Fraction(1, 16)


# -- smoothing ----------------------------------------------------------------


def test_smoothing_identical_sources():
    ext = identity_extractor(2)
    P = flat_source([BitString(2, 0), BitString(2, 1)])
    rep = smoothing_robustness_check(ext, P, P)
    assert rep.distance == 0 and rep.error == rep.error_smoothed and rep.ok


def test_smoothing_spike_removal():
    ext = identity_extractor(2)
    P = Distribution(
        {BitString(2, 0): Fraction(5, 8)}
        | {BitString(2, v): Fraction(1, 8) for v in range(1, 4)}
    )
    P_tilde = flat_source([BitString(2, v) for v in range(4)])
    rep = smoothing_robustness_check(ext, P, P_tilde)
    assert rep.distance == Fraction(3, 8)
    assert rep.error_smoothed == 0
    assert rep.error <= rep.bound == Fraction(3, 4)


def test_smoothing_random_perturbations():
    ext = toeplitz_extractor(3, 1, Fraction(1, 2))
    rng = random.Random(7)
    for _ in range(50):
        w = [rng.randint(1, 5) for _ in range(8)]
        v = [max(1, x + rng.randint(-1, 1)) for x in w]
        P = Distribution({BitString(3, i): Fraction(x, sum(w)) for i, x in enumerate(w)})
        Q = Distribution({BitString(3, i): Fraction(x, sum(v)) for i, x in enumerate(v)})
        rep = smoothing_robustness_check(ext, P, Q)
        assert abs(rep.error - rep.error_smoothed) <= 2 * rep.distance


# -- weak seeds ---------------------------------------------------------------


def test_weak_seed_independent_side_info():
    # Z constant: Hmin(Y|Z) = d, premise holds, bound 2*eps is certified
    ext = toeplitz_extractor(2, 1, Fraction(1, 2))
    J_yz = JointDistribution(
        {(BitString(2, v), "z"): Fraction(1, 4) for v in range(4)}
    )
    src = flat_source([BitString(2, v) for v in range(4)])
    rep = weak_seed_split_check(ext, J_yz, src, s=1, eps=Fraction(1, 2))
    assert rep.premise_ok and rep.skipped_reason is None
    assert rep.error is not None and rep.error <= rep.bound == 1
    assert rep.seed_sources_checked > 0


def test_weak_seed_premise_failure_reported():
    # Z a copy of Y: Hmin(Y|Z) = 0, far below s + log2(1/eps)
    ext = toeplitz_extractor(2, 1, Fraction(1, 2))
    J_yz = JointDistribution(
        {(BitString(2, v), v): Fraction(1, 4) for v in range(4)}
    )
    src = flat_source([BitString(2, v) for v in range(4)])
    rep = weak_seed_split_check(ext, J_yz, src, s=1, eps=Fraction(1, 2))
    assert not rep.premise_ok
    assert rep.error is None
    assert "Hmin(Y|Z)" in rep.skipped_reason


def test_weak_seed_too_many_supports_skips():
    ext = toeplitz_extractor(2, 1, Fraction(1, 2))
    J_yz = JointDistribution(
        {(BitString(2, v), "z"): Fraction(1, 4) for v in range(4)}
    )
    src = flat_source([BitString(2, v) for v in range(4)])
    rep = weak_seed_split_check(
        ext, J_yz, src, s=1, eps=Fraction(1, 2), max_premise_checks=1
    )
    assert not rep.premise_ok and "too many" in rep.skipped_reason


def test_weak_seed_eps_guard():
    ext = toeplitz_extractor(2, 1, Fraction(1, 2))
    J = JointDistribution({(BitString(3, 0), "z"): Fraction(1)})
    with pytest.raises(ParameterError):
        weak_seed_split_check(ext, J, flat_source([BitString(2, 0)]), 1, Fraction(0))


# -- test vectors -------------------------------------------------------------


def test_vector_round_trip():
    line = format_test_vector(
        "extractor_error", {"n": 4, "k": 2, "seed": "uniform"}, Fraction(3, 16)
    )
    assert line.startswith("TV1 extractor_error ")
    name, params, value = parse_test_vector(line)
    assert name == "extractor_error"
    assert params == {"n": "4", "k": "2", "seed": "uniform"}
    assert value == Fraction(3, 16)


def test_vector_rejects_unknown_version():
    with pytest.raises(ParameterError):
        parse_test_vector("TV9 thing a=1 = 1/2")
