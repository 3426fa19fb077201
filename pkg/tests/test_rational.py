from fractions import Fraction

import pytest

from rieszkit import as_fraction, format_rational, parse_rational


def test_parse_plain_and_fraction():
    assert parse_rational("3") == 3
    assert parse_rational("-7/2") == Fraction(-7, 2)
    assert parse_rational("+4/6") == Fraction(2, 3)
    assert parse_rational("0") == 0


@pytest.mark.parametrize(
    "bad", ["", "1.5", "1/0", "1/-2", "a", "1 / 2", "--3", "1/+2", "0x2", "2/02"]
)
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_format_round_trip():
    for text in ["0", "5", "-3", "1/2", "-9/7"]:
        assert format_rational(parse_rational(text)) == text
    # non-canonical inputs come back reduced
    assert format_rational(parse_rational("4/6")) == "2/3"


def test_as_fraction_refuses_floats():
    assert as_fraction(3) == 3
    assert as_fraction("1/2") == Fraction(1, 2)
    assert as_fraction(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(TypeError):
        as_fraction(0.5)
