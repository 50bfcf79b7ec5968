import pytest

import sketchgrad as sg

# The one-input benchmark: induce an if/else rescaling program from four
# input-output pairs generated by a known ground-truth program.

ONEVAR_SKETCH = """\
fn synth_prog(x: f32) -> f32
{
    if x [COND] [Real]
    {
        return [Real] [OP] x;
    }

    return x [OP] [Real];
}
"""

ONEVAR_TRUTH = """\
fn ground_truth_prog(x: f32) -> f32
{
    if x > 3.5
    {
        return 4.2 * x;
    }

    return x * 2.1;
}
"""

# Targets = ground truth evaluated on [1, 2, 4, 5].
ONEVAR_PAIRS = [((1.0,), 2.1), ((2.0,), 4.2), ((4.0,), 16.8), ((5.0,), 21.0)]

# A solution the search typically finds: same behaviour with the comparison
# flipped and the branch constants swapped accordingly.
ONEVAR_LEARNED = """\
fn synth_prog(x: f32) -> f32
{
    if x < 2.2305248
    {
        return 2.4594104 * x;
    }

    return x * 4.0324993;
}
"""

# The two-input benchmark.

TWOVAR_SKETCH = """\
fn synth_prog(x1: f32, x2: f32) -> f32
{
    if x1 [COND] x2
    {
        return [Real] [OP] x1 [OP] x2;
    }

    return [Real] [OP] x2 [OP] x1;
}
"""

TWOVAR_TRUTH = """\
fn ground_truth_prog(x1: f32, x2: f32) -> f32
{
    if x1 > x2
    {
        return 2.0 * x1 + x2;
    }

    return 2.0 / x2 - x1;
}
"""

TWOVAR_INPUTS = [(5.8, 2.5), (5.0, 6.2), (7.4, 6.1), (5.5, 9.4)]

# An overfit solution of the same shape the search can land on.
TWOVAR_LEARNED = """\
fn synth_prog(x1: f32, x2: f32) -> f32
{
    if x1 < x2
    {
        return 14.287576 / x1 - x2;
    }

    return 8.472884 * x2 / x1;
}
"""


@pytest.fixture(scope="session")
def onevar_sketch():
    return sg.parse_sketch(ONEVAR_SKETCH)


@pytest.fixture(scope="session")
def onevar_truth():
    return sg.parse_sketch(ONEVAR_TRUTH)


@pytest.fixture(scope="session")
def onevar_spec():
    return sg.SpecSet.from_pairs(ONEVAR_PAIRS)


@pytest.fixture(scope="session")
def twovar_sketch():
    return sg.parse_sketch(TWOVAR_SKETCH)


@pytest.fixture(scope="session")
def twovar_truth():
    return sg.parse_sketch(TWOVAR_TRUTH)


@pytest.fixture(scope="session")
def twovar_spec(twovar_truth):
    pairs = [(vec, sg.eval_program(twovar_truth, vec)) for vec in TWOVAR_INPUTS]
    return sg.SpecSet.from_pairs(pairs)
