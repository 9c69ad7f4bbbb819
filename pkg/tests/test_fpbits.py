"""Bit packing, payload surgery, and decimal rendering."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fpx import fpbits


@given(st.integers(0, 2**64 - 1))
def test_bits_roundtrip_64(bits):
    assert fpbits.to_bits(fpbits.from_bits(bits, 64), 64) == bits


@given(st.integers(0, 2**32 - 1))
def test_bits_roundtrip_32(bits):
    value = fpbits.from_bits(bits, 32)
    assert isinstance(value, np.float32)
    assert fpbits.to_bits(value) == bits


@given(st.integers(0, 2**16 - 1))
def test_bits_roundtrip_16(bits):
    value = fpbits.from_bits(bits, 16)
    assert isinstance(value, np.float16)
    assert fpbits.to_bits(value) == bits


@given(st.integers(0, 2**64 - 1))
def test_hex_roundtrip(bits):
    x = fpbits.from_bits(bits, 64)
    s = fpbits.hex_bits(x)
    assert len(s) == 18
    assert fpbits.to_bits(fpbits.from_hex_bits(s)) == bits


def test_hex_width_inference():
    assert fpbits.width_of(fpbits.from_hex_bits("0x7fc00000")) == 32
    assert fpbits.width_of(fpbits.from_hex_bits("0x7e00")) == 16
    assert fpbits.width_of(fpbits.from_hex_bits("0x" + "0" * 16)) == 64
    with pytest.raises(ValueError):
        fpbits.from_hex_bits("0x123")
    with pytest.raises(ValueError):
        fpbits.from_hex_bits("7fc00000")


def test_payload_helpers():
    p = fpbits.nan_with_payload(0x123)
    assert math.isnan(p)
    assert fpbits.nan_payload(p) == 0x123
    assert fpbits.nan_payload(1.5) == 0
    p16 = fpbits.nan_with_payload(0x23, width=16)
    assert fpbits.nan_payload(p16) == 0x23
    moved = fpbits.transfer_payload(float("nan"), p)
    assert fpbits.nan_payload(moved) == 0x123


@pytest.mark.parametrize("value, expected", [
    (float("nan"), "NaN"),
    (float("inf"), "Inf"),
    (float("-inf"), "-Inf"),
    (0.0, "0.0"),
    (-0.0, "-0.0"),
    (1.5, "1.5"),
    (-42.0, "-42.0"),
    (3.0e6, "3.0e6"),
    (999999.0, "999999.0"),
    (1e6, "1.0e6"),
    (123456.78, "123456.78"),
    (6.02214076e23, "6.02214076e23"),
    (6.62607015e-34, "6.62607015e-34"),
    (0.0001, "0.0001"),
    (1e-5, "1.0e-5"),
    (-1.515e31, "-1.515e31"),
])
def test_format_dec(value, expected):
    assert fpbits.format_dec(value) == expected


def test_format_dec_narrow_widths():
    assert fpbits.format_dec(np.float32(3e6)) == "3.0e6"
    assert fpbits.format_dec(np.float32("nan")) == "NaN"
    assert fpbits.format_dec(np.float16(0.1)) == "0.1"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_dec_roundtrips(x):
    assert float(fpbits.format_dec(x)) == x
