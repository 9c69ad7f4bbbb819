"""Tracked scalar semantics: the intercept pipeline, transparency, payloads."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fpx
from fpx import fpbits
from fpx.classify import EventKind, OpIdentity, ValueClass
from fpx.ledger import LedgerConfig
from fpx.session import explicit_session, use_session
from fpx.tracked import (TrackedFloat, TrackedFloat16, TrackedFloat32,
                         TrackedFloat64, apply, maximum, minimum, unwrap, wrap)

NAN = float("nan")
INF = float("inf")


# Plain-scalar oracle: the same IEEE substrate, used directly, no pipeline.
PLAIN = {
    ("+", 2): np.add, ("-", 2): np.subtract, ("*", 2): np.multiply,
    ("/", 2): np.divide, ("pow", 2): np.power, ("min", 2): np.minimum,
    ("max", 2): np.maximum, ("atan2", 2): np.arctan2, ("hypot", 2): np.hypot,
    ("rem", 2): np.fmod,
    ("-", 1): np.negative, ("abs", 1): np.abs, ("sqrt", 1): np.sqrt,
    ("exp", 1): np.exp, ("log", 1): np.log, ("sin", 1): np.sin,
    ("cos", 1): np.cos, ("tan", 1): np.tan, ("floor", 1): np.floor,
    ("ceil", 1): np.ceil,
}

NUMERIC_OPS = sorted(PLAIN, key=str)


def plain_eval(leaves, program, np_type):
    values = [np_type(x) for x in leaves]
    with np.errstate(all="ignore"):
        for name_arity, arg_indexes in program:
            fn = PLAIN[name_arity]
            values.append(fn(*(values[i] for i in arg_indexes)))
    return values


def tracked_eval(leaves, program, cls):
    session = explicit_session(LedgerConfig(log_kinds=frozenset()))
    values = [cls(x) for x in leaves]
    for (name, _), arg_indexes in program:
        values.append(apply(name, tuple(values[i] for i in arg_indexes), session=session))
    return [unwrap(v) for v in values]


def random_program(rng, n_ops):
    """Op list over an implicit node list seeded with 4 leaves."""
    program = []
    size = 4
    for _ in range(n_ops):
        name, arity = rng.choice(NUMERIC_OPS)
        program.append(((name, arity), tuple(rng.randrange(size) for _ in range(arity))))
        size += 1
    return program


LEAF_POOL_64 = [
    0.0, -0.0, 1.0, -1.0, 2.5, -3.75, 1e-300, -1e308, 1e308, 0.5, 1234.5678,
    INF, -INF, NAN, 5e-324,
]
PAYLOAD_LEAVES_64 = [fpbits.nan_with_payload(0x123), fpbits.nan_with_payload(0xBEEF)]


def test_wrap_unwrap_bit_identity():
    for x in (1.5, -0.0, 0.0, INF, -INF, 5e-324):
        assert fpbits.to_bits(unwrap(wrap(x))) == fpbits.to_bits(x)
    p = fpbits.nan_with_payload(0x123)
    assert fpbits.to_bits(unwrap(wrap(p))) == fpbits.to_bits(p)
    n32 = fpbits.from_bits(0x7FC00123, 32)
    assert fpbits.to_bits(unwrap(wrap(n32, width=32))) == 0x7FC00123


@given(st.integers(0, 2**64 - 1))
def test_wrap_unwrap_bit_identity_exhaustive(bits):
    x = fpbits.from_bits(bits, 64)
    assert fpbits.to_bits(unwrap(TrackedFloat64(x))) == bits


def test_apply_examples(session):
    with use_session(session):
        r = apply("/", (TrackedFloat64(0.0), TrackedFloat64(0.0)))
        assert math.isnan(unwrap(r))
        events = session.ledger.events()
        assert len(events) == 1
        assert events[0].kind is EventKind.GEN
        assert events[0].value_class is ValueClass.NAN

        avogadro, planck = 6.02214076e23, 6.62607015e-34
        r = apply("+", (TrackedFloat64(avogadro), TrackedFloat64(planck)))
        assert unwrap(r) == avogadro

        r = apply("max", (TrackedFloat64(5.0), TrackedFloat64(NAN)))
        assert math.isnan(unwrap(r))
        props = session.ledger.events(kind=EventKind.PROP)
        assert len(props) == 1 and props[0].op == OpIdentity("max", 2)

        r = apply("pow", (TrackedFloat64(1.0), TrackedFloat64(NAN)))
        assert unwrap(r) == 1.0
        kills = session.ledger.events(kind=EventKind.KILL)
        assert any(e.op == OpIdentity("pow", 2) and e.value_class is ValueClass.NAN
                   for e in kills)


def test_dual_class_event(session):
    with use_session(session):
        r = TrackedFloat64(-INF) - TrackedFloat64(-INF)
    assert math.isnan(unwrap(r))
    events = session.ledger.events()
    assert len(events) == 2
    kinds = {(e.value_class, e.kind) for e in events}
    assert kinds == {(ValueClass.NAN, EventKind.GEN), (ValueClass.INF, EventKind.KILL)}


def test_transitive_tracking(session):
    with use_session(session):
        assert isinstance(TrackedFloat64(2.0) * 3.0, TrackedFloat64)
        assert isinstance(3.0 * TrackedFloat64(2.0), TrackedFloat64)
        assert isinstance(2 + TrackedFloat64(1.0), TrackedFloat64)
        assert isinstance(TrackedFloat64(1.0) < 2.0, bool)
        assert isinstance(fpx.sqrt(TrackedFloat64(2.0)), TrackedFloat64)


def test_mixed_width_promotes_to_wider(session):
    with use_session(session):
        assert isinstance(TrackedFloat64(1.0) + TrackedFloat32(1.0), TrackedFloat64)
        assert isinstance(TrackedFloat32(1.0) + TrackedFloat64(1.0), TrackedFloat64)
        assert isinstance(TrackedFloat32(1.0) + TrackedFloat16(1.0), TrackedFloat32)
        # plain operands are weak: they coerce to the tracked width
        assert isinstance(TrackedFloat32(1.0) + 2.0, TrackedFloat32)
        assert isinstance(TrackedFloat16(1.0) * 2, TrackedFloat16)


def test_comparison_kills(session):
    nan = TrackedFloat64(NAN)
    three = TrackedFloat64(3.0)
    with use_session(session):
        assert (nan < three) is False
        assert (nan <= three) is False
        assert (nan > three) is False
        assert (nan >= three) is False
        assert (nan == three) is False
        assert (nan != three) is True
    events = session.ledger.events()
    assert len(events) == 6
    assert all(e.kind is EventKind.KILL and e.value_class is ValueClass.NAN
               for e in events)


def test_clean_comparisons_emit_nothing(session):
    with use_session(session):
        assert bool(TrackedFloat64(1.0) < TrackedFloat64(2.0))
        assert TrackedFloat64(2.0) == TrackedFloat64(2.0)
    assert session.ledger.events() == []


def test_min_max_propagate_nan(session):
    with use_session(session):
        assert math.isnan(unwrap(maximum(TrackedFloat64(5.0), TrackedFloat64(NAN))))
        assert math.isnan(unwrap(minimum(TrackedFloat64(NAN), TrackedFloat64(5.0))))


def test_unsupported_and_untracked():
    with pytest.raises(ValueError):
        apply("@", (TrackedFloat64(1.0), TrackedFloat64(2.0)))
    with pytest.raises(TypeError):
        apply("+", (1.0, 2.0))


def test_immutability_and_conversions():
    t = TrackedFloat64(2.5)
    with pytest.raises(AttributeError):
        t._value = 3.0
    assert int(t) == 2
    assert bool(t) is True
    assert bool(TrackedFloat64(0.0)) is False
    with pytest.raises(ValueError):
        int(TrackedFloat64(NAN))
    assert repr(t) == "TrackedFloat64(2.5)"


def test_numpy_does_not_absorb_tracked(session):
    with use_session(session):
        r = np.float64(2.0) * TrackedFloat64(3.0)
    assert isinstance(r, TrackedFloat64)
    assert unwrap(r) == 6.0


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_numeric_transparency_property(data):
    """Random DAGs, depth <= 8: tracked (injection off) == plain, bit for bit."""
    rng = random.Random(data.draw(st.integers(0, 2**32 - 1)))
    leaves = [rng.choice(LEAF_POOL_64 + PAYLOAD_LEAVES_64) for _ in range(4)]
    program = random_program(rng, rng.randint(1, 8))
    plain = plain_eval(leaves, program, np.float64)
    tracked = tracked_eval(leaves, program, TrackedFloat64)
    for p, t in zip(plain, tracked):
        assert fpbits.to_bits(float(p)) == fpbits.to_bits(float(t))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_payload_conservation_chain(data):
    """A payload NaN pushed through a random op chain keeps its payload
    whenever the result is NaN and no other NaN was generated."""
    rng = random.Random(data.draw(st.integers(0, 2**32 - 1)))
    payload = data.draw(st.integers(1, (1 << 51) - 1))
    session = explicit_session()
    value = TrackedFloat64(fpbits.nan_with_payload(payload))
    for _ in range(20):
        name, arity = NUMERIC_OPS[rng.randrange(len(NUMERIC_OPS))]
        if arity == 1:
            value = apply(name, (value,), session=session)
        else:
            other = TrackedFloat64(rng.uniform(-10.0, 10.0))
            operands = (value, other) if rng.random() < 0.5 else (other, value)
            value = apply(name, operands, session=session)
    result = unwrap(value)
    gens = session.ledger.events(kind=EventKind.GEN, value_class=ValueClass.NAN)
    if math.isnan(result) and not gens:
        assert fpbits.nan_payload(result) == payload


def test_tracked_float16_round_trip():
    t = TrackedFloat16(1.5)
    assert isinstance(unwrap(t), np.float16)
    session = explicit_session()
    with use_session(session):
        r = t / TrackedFloat16(0.0)
    assert math.isinf(float(unwrap(r)))
    assert session.ledger.events()[0].value_class is ValueClass.INF


def test_supported_operations_table():
    ops = fpx.supported_operations()
    assert OpIdentity("+", 2) in ops
    assert OpIdentity("-", 1) in ops
    assert OpIdentity("<", 2) in ops
    assert len(ops) == 26


def test_concurrent_apply_serializes_events():
    import threading

    session = explicit_session()
    nan = TrackedFloat64(NAN)
    one = TrackedFloat64(1.0)

    def worker():
        for _ in range(100):
            apply("+", (nan, one), session=session)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    events = session.ledger.events()
    assert len(events) == 400
    assert len({e.seq for e in events}) == 400
