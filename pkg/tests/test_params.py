import json
import math
from fractions import Fraction

import pytest

from trevext.errors import ParameterError, UnsupportedParametersError
from trevext.params import (
    PINNED_CONSTANTS,
    REPORT_SCHEMA_VERSION,
    params_report_json,
    params_report_machine,
    params_report_text,
    preset,
    rt_upper_bound,
    smooth_budget,
    trevisan_params,
    weak_seed_params,
)
from trevext.weak_design import block_layout, ceil_div_ln


def test_rt_bound_examples():
    b = rt_upper_bound(20, Fraction(1, 16))
    assert b.m_max == 12 and not b.infeasible
    b = rt_upper_bound(10, Fraction(1, 2))
    assert b.m_max == 8
    # additive constant is pinned to zero
    assert PINNED_CONSTANTS["rt_additive"] == 0


def test_rt_bound_infeasible_clamps():
    b = rt_upper_bound(2, Fraction(1, 8))
    assert b.m_max == 0 and b.infeasible


def test_rt_bound_rejects_negative_k():
    with pytest.raises(ParameterError):
        rt_upper_bound(-1, Fraction(1, 2))


def test_smooth_budget():
    assert smooth_budget(Fraction(1, 1024), Fraction(1, 4096)) == Fraction(3, 2048)
    assert smooth_budget(0, 0) == 0
    with pytest.raises(ParameterError):
        smooth_budget(Fraction(-1, 2), 0)


def test_uniform_seed_threshold_accounting():
    # k = m + 8 log2 m + 8 log2(1/eps) + 8 log2 3, exactly
    for n, m, le in [(1024, 64, 10), (1 << 16, 256, 3), (256, 1, 4)]:
        p = preset("cor1", n, Fraction(1, 1 << le), m)
        expected = m + 8 * math.log2(m) + 8 * le + PINNED_CONSTANTS["preset_cor1_additive"]
        assert p.k == pytest.approx(expected, rel=1e-12)


def test_uniform_seed_error_budget_split():
    p = preset("cor1", 1024, Fraction(1, 8), 4)
    assert p.eps_c == (Fraction(1, 8) / 12) ** 2
    assert p.delta == p.eps_c / 2
    assert p.t == 2 * p.s_bits
    # advertised error recombines exactly: 3m * sqrt(eps_c) = eps
    assert 3 * p.m * Fraction(1, 96) == Fraction(1, 8)


def test_seed_length_formula_block():
    p = preset("cor1", 1024, Fraction(1, 1024), 64)
    assert p.d == p.t * ceil_div_ln(p.t, 2) * len(block_layout(p.m))


def test_greedy_design_kind():
    g = trevisan_params(1024, Fraction(1, 1024), 64, design_kind="greedy", r=Fraction(2))
    assert g.d == g.t * ceil_div_ln(g.t, 2)
    assert g.r == 2
    # the overlap parameter enters the threshold linearly
    b = trevisan_params(1024, Fraction(1, 1024), 64)
    assert g.k == pytest.approx(b.k + 64, rel=1e-12)
    with pytest.raises(ParameterError):
        trevisan_params(64, Fraction(1, 4), 2, design_kind="greedy", r=Fraction(1))


def test_regression_pin_mid_size():
    p = preset("cor1", 1024, Fraction(1, 1024), 64)
    assert (p.s_bits, p.t, p.d) == (76, 152, 234080)
    assert p.eps_c == Fraction(1, 38654705664)
    assert p.k == pytest.approx(204.6797000057692, rel=1e-12)
    assert not p.constructible  # symbol size beyond the field table
    assert p.entropy_loss == pytest.approx(p.k - 64)
    assert p.rt_slack == pytest.approx(p.entropy_loss - 20)


def test_constructible_flag_small_instance():
    p = preset("cor1", 1 << 16, Fraction(1, 8), 256)
    assert p.constructible and p.s_bits == 62 and p.t == 124


def test_single_output_bit():
    p = preset("cor1", 64, Fraction(1, 4), 1)
    assert p.m == 1 and p.d == p.t * ceil_div_ln(p.t, 2)
    assert p.eps_c == Fraction(1, 144)


def test_parameter_guards():
    with pytest.raises(ParameterError):
        trevisan_params(64, Fraction(0), 4)
    with pytest.raises(ParameterError):
        trevisan_params(64, Fraction(2), 4)
    with pytest.raises(ParameterError):
        trevisan_params(64, Fraction(1, 4), 0)
    with pytest.raises(ParameterError):
        preset("nope", 64, Fraction(1, 4), 4)


def test_weak_seed_shape_and_clamp():
    p = preset("cor4", 1024, Fraction(1, 1024), 64)
    assert p.preset == "weak-seed"
    assert p.eps_c == (Fraction(1, 1024) / 384) ** 2
    assert p.t == math.ceil(8 * (2 * p.s_bits) / 0.75)
    assert p.c_shape == pytest.approx(p.d / p.t)
    # beta > 1/2 drives the raw requirement above d; clamped to d
    assert p.s_req == float(p.d)
    assert any("clamped" in note for note in p.notes)
    assert not p.constructible
    assert p.k_c == pytest.approx(
        3 * math.log2(1 / float(p.eps_c)) + PINNED_CONSTANTS["weak_seed_one_bit_additive"],
        rel=1e-9,
    )


def test_weak_seed_beta_guard():
    with pytest.raises(ParameterError):
        weak_seed_params(64, Fraction(1, 4), 2, beta=0.5)
    with pytest.raises(ParameterError):
        weak_seed_params(64, Fraction(1, 4), 2, beta=1.0)


def test_two_stage_preset_notes():
    p = preset("cor2", 1024, Fraction(1, 1024), 64)
    base = preset("cor1", 1024, Fraction(1, 1024), 64)
    assert p.preset == "cor2"
    assert (p.k, p.d, p.t) == (base.k, base.d, base.t)
    assert any("Toeplitz" in note for note in p.notes)
    assert PINNED_CONSTANTS["toeplitz_loss_factor"] == 2.0
    assert PINNED_CONSTANTS["almost_universal_loss_factor"] == 4.0


def test_local_preset_unsupported():
    with pytest.raises(UnsupportedParametersError):
        preset("cor3", 1024, Fraction(1, 1024), 64)


def test_determinism():
    a = preset("cor1", 4096, Fraction(1, 4096), 128)
    b = preset("cor1", 4096, Fraction(1, 4096), 128)
    assert a == b
    assert params_report_json(a) == params_report_json(b)


def test_machine_report_schema():
    p = preset("cor1", 1024, Fraction(1, 1024), 64)
    doc = params_report_machine(p)
    assert doc["schema_version"] == REPORT_SCHEMA_VERSION
    assert doc["eps"] == [1, 1024]
    assert doc["pinned_constants"] == PINNED_CONSTANTS
    round_tripped = json.loads(params_report_json(p))
    assert round_tripped["d"] == p.d and round_tripped["k"] == p.k


def test_text_report_mentions_key_fields():
    p = preset("cor4", 1024, Fraction(1, 1024), 64)
    text = params_report_text(p)
    assert "seed_min_entropy" in text and "note:" in text
    assert f"d {' ' * 15}= {p.d}".replace(" ", "") in text.replace(" ", "")
