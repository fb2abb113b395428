import json
import random
from itertools import combinations
from pathlib import Path

import pytest

from gradecalc.cech import CoverPresheaf, cech_betti, cech_complex, is_cocycle
from gradecalc.errors import IntegrityError, ValidationError

from oracles import nerve_betti

FIXTURES = Path(__file__).parent / "fixtures"


def interval():
    return CoverPresheaf.constant(2, [(0, 1)])


def circle_two():
    # two arcs whose overlap has two components
    return CoverPresheaf(2, {(0,): 1, (1,): 1, (0, 1): 2},
                         {((0,), (0, 1)): [[1], [1]], ((1,), (0, 1)): [[1], [1]]})


def circle_three():
    return CoverPresheaf.constant(3, [(0, 1), (1, 2), (0, 2)])


def load_fixtures():
    out = []
    for case in json.loads((FIXTURES / "cech_covers.json").read_text()):
        dims = {tuple(int(i) - 1 for i in k.split(",")): d for k, d in case["dims"].items()}
        res = {}
        for k, m in case.get("restrictions", {}).items():
            a, b = k.split("->")
            res[(tuple(int(i) - 1 for i in a.split(",")), tuple(int(i) - 1 for i in b.split(",")))] = m
        out.append((case["name"], CoverPresheaf(case["n_opens"], dims, res), case["betti"]))
    return out


def test_examples():
    assert cech_betti(interval()).trimmed().values == (1,)
    assert cech_betti(circle_two()).values == (1, 1)
    assert cech_betti(circle_three()).values[:2] == (1, 1)
    assert cech_betti(circle_three()).trimmed().values == (1, 1)


@pytest.mark.parametrize("name,cp,expected", load_fixtures())
def test_fixture_covers(name, cp, expected):
    C = cech_complex(cp)
    C.check()
    assert list(cech_betti(cp).values) == expected


def random_complex(rng, n):
    faces = set()
    for _ in range(rng.randint(1, 4)):
        top = rng.sample(range(n), rng.randint(1, min(n, 4)))
        for k in range(1, len(top) + 1):
            faces.update(tuple(sorted(s)) for s in combinations(top, k))
    faces.update((i,) for i in range(n))
    return faces


def test_random_nerves_match_simplicial_oracle():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(1, 5)
        faces = random_complex(rng, n)
        cp = CoverPresheaf.constant(n, [f for f in faces if len(f) > 1])
        C = cech_complex(cp)
        C.check()
        ours = list(cech_betti(cp).values)
        ref = nerve_betti(faces)
        assert ours[:len(ref)] == ref
        assert all(v == 0 for v in ours[len(ref):])


def test_cocycles():
    cp = circle_two()
    # a locally constant function on the overlap taking values 0 and 1
    assert is_cocycle(cp, 1, {(0, 1): [0, 1]})
    assert is_cocycle(cp, 0, {(0,): [1], (1,): [1]})
    assert not is_cocycle(cp, 0, {(0,): [1], (1,): [0]})


def test_incompatible_restrictions():
    dims = {(0,): 1, (1,): 1, (2,): 1, (0, 1): 1, (0, 2): 1, (1, 2): 1, (0, 1, 2): 1}
    res = {((0, 1), (0, 1, 2)): [[2]]}
    with pytest.raises(IntegrityError):
        CoverPresheaf(3, dims, res)


def test_shape_errors():
    with pytest.raises(ValidationError):
        CoverPresheaf(2, {(0,): 1, (1,): 1, (0, 1): 2})
    with pytest.raises(ValidationError):
        CoverPresheaf(2, {(1, 0): 1})
    with pytest.raises(ValidationError):
        CoverPresheaf(0, {})
