import pytest

from split_thue import FamilyInstance, PrecisionBudget, RecurrentSequence
from split_thue.cubic import compute_constants


@pytest.fixture(scope="session")
def budget():
    return PrecisionBudget(working_bits=256)


@pytest.fixture(scope="session")
def fib_seq():
    # a_0 = 1, a_1 = 2, a_n = a_{n-1} + a_{n-2}  (shifted Fibonacci)
    return RecurrentSequence.from_recurrence([1, -1, -1], [1, 2])


@pytest.fixture(scope="session")
def pow2_seq():
    # a_n = 2^{n+1}
    return RecurrentSequence.from_recurrence([1, -2], [2])


@pytest.fixture(scope="session")
def fib_pow2(fib_seq, pow2_seq, budget):
    return FamilyInstance.build(fib_seq, pow2_seq, budget)


@pytest.fixture(scope="session")
def fib_pow2_consts(fib_pow2):
    return compute_constants(fib_pow2)
