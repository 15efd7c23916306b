from fractions import Fraction

import pytest

from tubecone.scalars import (ExactScalar, format_rational, get_field, parse_rational, scalar_from_json,
                              scalar_to_json)


def test_parse_and_format_rational():
    assert parse_rational("3/7") == Fraction(3, 7)
    assert parse_rational(5) == 5
    assert format_rational(Fraction(6, 3)) == "2"
    assert format_rational(Fraction(-1, 100)) == "-1/100"
    with pytest.raises(TypeError):
        parse_rational(0.5)


def test_sqrt_phi_field_holds_fibonacci_dimension():
    K = get_field("sqrt_phi")
    t = K.theta()
    phi = t * t
    assert phi * phi == phi + 1
    assert abs(float(phi) - (1 + 5 ** 0.5) / 2) < 1e-15
    assert (1 / t) * t == K.from_rational(1)


def test_fourth_root2_field_and_sqrt():
    K = get_field("fourth_root2")
    t = K.theta()
    assert t ** 4 == K.from_rational(2)
    two = K.from_rational(2)
    assert two.sqrt() == t * t
    assert str((t * t).to_sympy()) == "sqrt(2)"


def test_gaussian_extension_conjugation():
    K = get_field("rational")
    z = K.from_rational(3) + K.i * K.from_rational(4)
    assert z * z.conjugate() == K.from_rational(25)
    assert z.abs() == K.from_rational(5)
    assert not z.is_real()
    assert z.imag == K.from_rational(4)


def test_exact_sign_and_order():
    K = get_field("sqrt_phi")
    t = K.theta()
    phi = t * t
    assert phi - K.from_rational(Fraction(1618033988, 10 ** 9)) > 0
    assert phi - K.from_rational(Fraction(1618033989, 10 ** 9)) < 0


def test_json_roundtrip():
    K = get_field("fourth_root2")
    x = K.theta() * K.from_rational(Fraction(-3, 5)) + K.i
    back = scalar_from_json(scalar_to_json(x), K)
    assert isinstance(back, ExactScalar)
    assert back == x


def test_unknown_field_tag():
    with pytest.raises(KeyError):
        get_field("nope")
