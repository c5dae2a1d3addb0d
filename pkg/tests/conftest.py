import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from apstrip import model as md

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

SQRT2 = math.sqrt(2)


def log_exp_minus_1():
    return md.LogAbs(md.holo((1, 1), (0, -1)))


def log_one_minus(c=0.5):
    return md.LogAbs(md.holo((0, 1), (1, -c)))


def log_sin():
    return md.LogAbs(md.holo((1, -0.5j), (-1, 0.5j)))


def abs_z_squared():
    return lambda z: np.abs(np.asarray(z)) ** 2


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
freq = st.floats(-4, 4, allow_nan=False).map(lambda f: round(f, 3))


@st.composite
def holo_polys(draw, max_terms=3):
    fs = draw(st.lists(freq, min_size=1, max_size=max_terms, unique=True))
    cs = draw(st.lists(coef.filter(lambda c: abs(c) > 1e-3), min_size=len(fs), max_size=len(fs)))
    return md.HoloPoly(tuple(zip(fs, cs)))


@st.composite
def exprs(draw, depth=2):
    """Random generator trees built from the smooth node kinds."""
    kind = draw(st.sampled_from(["expsum", "holo", "logabs", "exp"] + (["sum", "max", "scale", "shift"] if depth else [])))
    if kind == "expsum":
        fs = draw(st.lists(freq, min_size=1, max_size=3, unique=True))
        profs = []
        for _ in fs:
            c = draw(coef)
            k = draw(st.floats(-2, 2))
            profs.append(draw(st.sampled_from([md.ConstProfile(c), md.ExpProfile(c, k), md.PolyProfile((c, 0.5 + 0j))])))
        return md.ExpSum(tuple(zip(fs, profs)))
    if kind == "holo":
        return draw(holo_polys())
    if kind == "logabs":
        return md.LogAbs(draw(holo_polys()))
    if kind == "exp":
        return md.Exp(md.LogAbs(draw(holo_polys())))
    if kind in ("sum", "max"):
        args = tuple(draw(st.lists(exprs(depth - 1), min_size=1, max_size=2)))
        return md.Sum(args) if kind == "sum" else md.Max(args)
    if kind == "scale":
        return md.Scale(draw(st.floats(0, 3)), draw(exprs(depth - 1)))
    return md.HShift(draw(st.floats(-10, 10)), draw(exprs(depth - 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; returns the pass flag for the caller to assert."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
