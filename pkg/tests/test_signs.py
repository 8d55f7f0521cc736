import itertools

import pytest

from qpnet.signs import AMBIGUOUS, MINUS, PLUS, ZERO, Sign, add, add_all, product

ALL = [PLUS, MINUS, ZERO, AMBIGUOUS]

# Reference operator tables, row = left operand, column = right operand,
# in the order +, -, 0, ?.  Frozen independently of the implementation.
PRODUCT_TABLE = [
    "+-0?",
    "-+0?",
    "0000",
    "??0?",
]
ADD_TABLE = [
    "+?+?",
    "?--?",
    "+-0?",
    "????",
]


def table_lookup(table, s1, s2):
    order = "+-0?"
    return Sign(table[order.index(s1.value)][order.index(s2.value)])


def test_product_matches_reference_table_exhaustively():
    for s1, s2 in itertools.product(ALL, ALL):
        assert product(s1, s2) is table_lookup(PRODUCT_TABLE, s1, s2)


def test_add_matches_reference_table_exhaustively():
    for s1, s2 in itertools.product(ALL, ALL):
        assert add(s1, s2) is table_lookup(ADD_TABLE, s1, s2)


def test_product_is_commutative_and_associative():
    for a, b in itertools.product(ALL, ALL):
        assert product(a, b) is product(b, a)
    for a, b, c in itertools.product(ALL, ALL, ALL):
        assert product(product(a, b), c) is product(a, product(b, c))


def test_product_identity_and_annihilator():
    for a in ALL:
        assert product(PLUS, a) is a
        assert product(ZERO, a) is ZERO


def test_add_is_commutative_and_associative():
    for a, b in itertools.product(ALL, ALL):
        assert add(a, b) is add(b, a)
    for a, b, c in itertools.product(ALL, ALL, ALL):
        assert add(add(a, b), c) is add(a, add(b, c))


def test_add_identity_idempotence_absorption():
    for a in ALL:
        assert add(ZERO, a) is a
        assert add(a, a) is a
        assert add(AMBIGUOUS, a) is AMBIGUOUS


@pytest.mark.parametrize(
    "items,expected",
    [
        ([], ZERO),
        ([PLUS, PLUS, MINUS], AMBIGUOUS),
        ([MINUS, ZERO, MINUS], MINUS),
    ],
)
def test_add_all_examples(items, expected):
    assert add_all(items) is expected


def test_add_all_is_order_independent_up_to_length_four():
    for n in range(5):
        for items in itertools.product(ALL, repeat=n):
            results = {add_all(p) for p in itertools.permutations(items)}
            assert len(results) == 1


def test_sign_serialization_round_trip():
    for s in ALL:
        assert Sign(str(s)) is s
    assert [str(s) for s in ALL] == ["+", "-", "0", "?"]


def test_sign_from_bool():
    assert Sign.from_bool(True) is PLUS
    assert Sign.from_bool(False) is MINUS
