"""
Tests for pulse_file.py
Pulse definition files for every family and the errors malformed files raise
"""

import math

import pytest

from pulse_file import PulseFileError, build_profile, load_pulse, read_pulse_spec


def _write(tmp_path, text, name="pulse.env"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_free_pulse_from_phase(tmp_path):
    profile, spec = load_pulse(_write(tmp_path, "family=Free\nphi=0.7853981633974483\nt_end=10\ntarget=sqrt_swap\n"))
    assert profile.family == "Free"
    assert profile.phi(10.0) == pytest.approx(math.pi / 4)
    assert spec.text("target") == "sqrt_swap"


def test_constant_pair(tmp_path):
    profile, _ = load_pulse(_write(tmp_path, "# constant pulse\nfamily=ConstantPair\nJ=0.3\nBminus=0.1\nBplus=0.05\nt_end=20\n"))
    assert profile.J(3.0) == pytest.approx(0.3)
    assert profile.bminus(3.0) == pytest.approx(0.1)
    assert profile.gamma(20.0) == pytest.approx(1.0)


@pytest.mark.parametrize("shape_lines", ["q_shape=constant\n", "q_shape=sech\nq_rate=0.2\n", "q_shape=sin2\nq_duration=40\n"])
def test_proportional_shapes(tmp_path, shape_lines):
    text = "family=Proportional\nlambda=0.5\nq=0.4\nt_end=40\n" + shape_lines
    profile, _ = load_pulse(_write(tmp_path, text))
    assert profile.family == "Proportional"
    assert profile.J(5.0) / profile.bminus(5.0) == pytest.approx(math.tan(0.5))


def test_sech_and_dual_sech(tmp_path):
    for family in ("Sech", "DualSech"):
        profile, _ = load_pulse(_write(tmp_path, f"family={family}\na=0.5\nc=0.05\nomega=0.1\nt_end=200\n", f"{family}.env"))
        assert profile.family == family
        assert profile.t_end == 200.0


def test_q_vector(tmp_path):
    profile, _ = load_pulse(_write(tmp_path, "family=QVector\nradius=0.6\nq2_start=0.1\nsweep=2.0\nt_end=10\n"))
    assert profile.family == "QVector"


def test_sampled(tmp_path):
    text = "family=Sampled\ntimes=0,1,2,3,4\nJ=0.1,0.2,0.3,0.2,0.1\nBminus=0,0,0,0,0\n"
    profile, _ = load_pulse(_write(tmp_path, text))
    assert profile.t_end == 4.0
    assert profile.J(2.0) == pytest.approx(0.3)


def test_sampled_length_mismatch(tmp_path):
    text = "family=Sampled\ntimes=0,1,2,3\nJ=0.1,0.2,0.3\nBminus=0,0,0,0\n"
    with pytest.raises(PulseFileError) as info:
        load_pulse(_write(tmp_path, text))
    assert info.value.field == "times" and info.value.line == 2


def test_unknown_family(tmp_path):
    with pytest.raises(PulseFileError) as info:
        read_pulse_spec(_write(tmp_path, "t_end=4\nfamily=Gaussian\n"))
    assert info.value.field == "family" and info.value.line == 2


def test_key_of_other_family(tmp_path):
    with pytest.raises(PulseFileError) as info:
        read_pulse_spec(_write(tmp_path, "family=Sech\na=0.5\nc=0.1\nomega=0.2\nJ=0.3\nt_end=10\n"))
    assert info.value.field == "J" and info.value.line == 5


def test_malformed_line(tmp_path):
    with pytest.raises(PulseFileError) as info:
        read_pulse_spec(_write(tmp_path, "family=Free\nthis is not a pair\n"))
    assert info.value.line == 2


def test_not_a_number(tmp_path):
    spec = read_pulse_spec(_write(tmp_path, "family=ConstantPair\nJ=abc\nBminus=0.1\nt_end=4\n"))
    with pytest.raises(PulseFileError) as info:
        build_profile(spec)
    assert info.value.field == "J" and info.value.line == 2
    assert "line 2" in str(info.value)


def test_non_positive_time(tmp_path):
    spec = read_pulse_spec(_write(tmp_path, "family=ConstantPair\nJ=0.1\nBminus=0.1\nt_end=-1\n"))
    with pytest.raises(PulseFileError) as info:
        build_profile(spec)
    assert info.value.field == "t_end"


def test_missing_value(tmp_path):
    spec = read_pulse_spec(_write(tmp_path, "family=Sech\na=0.5\nomega=0.2\nt_end=10\n"))
    with pytest.raises(PulseFileError) as info:
        build_profile(spec)
    assert info.value.field == "c"


def test_unknown_target(tmp_path):
    with pytest.raises(PulseFileError) as info:
        read_pulse_spec(_write(tmp_path, "family=Free\nJ=1\nt_end=1\ntarget=cnot\n"))
    assert info.value.field == "target"


def test_missing_file(tmp_path):
    with pytest.raises(PulseFileError):
        read_pulse_spec(tmp_path / "absent.env")
