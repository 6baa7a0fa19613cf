import pytest

import fixture_lib
from morseflow import model, validator
from morseflow.validator import segments_intersect


def test_default_config_clean():
    rep = validator.validate(model.new_default())
    assert rep.diagnostics == []
    assert rep.animatable


def test_minimal_config_exception():
    rep = validator.validate(model.new_minimal())
    assert rep.animatable


@pytest.mark.parametrize("code", sorted(fixture_lib.DIAGNOSTIC_FIXTURES))
def test_each_code_has_exact_fixture(code):
    skel = fixture_lib.DIAGNOSTIC_FIXTURES[code]()
    rep = validator.validate(skel)
    assert rep.codes() == {code}
    assert not rep.animatable


def test_validate_deterministic():
    skel = fixture_lib.fx_crossing()
    a = validator.validate(skel).to_json()
    b = validator.validate(skel).to_json()
    assert a == b


def test_diagnostics_ordered_by_check_then_entities():
    s = model.new_default()
    s.disconnect("e0")  # breaks saddle alternation and isolates n1
    s.drag_singularity("n2", (1.3, 0.0))  # out of bounds
    rep = validator.validate(s)
    codes = [d.code for d in rep.diagnostics]
    assert codes == sorted(codes, key=lambda c: validator._CHECK_ORDER[c])


def test_valueorder_lists_saddle_and_extremum():
    s = fixture_lib.fx_value_order()
    (diag,) = validator.validate(s).diagnostics
    assert diag.code == "ValueOrderViolation"
    assert "n3" in diag.entities


def test_segments_intersect_examples():
    assert segments_intersect((0, 0), (1, 1), (0, 1), (1, 0))
    # collinear disjoint
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))
    # shared endpoint only
    assert not segments_intersect((0, 0), (1, 0), (1, 0), (1, 1))
    # near touch within tolerance
    assert segments_intersect((0, 0), (1, 0), (0.5, 1e-7), (0.5, 1), tol=1e-6)
    assert not segments_intersect((0, 0), (1, 0), (0.5, 1e-4), (0.5, 1), tol=1e-6)


def test_validate_never_raises_on_garbage():
    s = model.Skeleton()
    s.add_singularity("saddle", (0, 0), 1.0)
    rep = validator.validate(s)
    assert not rep.animatable
