from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from gradecalc.core import Element, Monomial, RingSpec
from gradecalc.derivations import GradedDerivation
from gradecalc.forms import Form, FormMonomial

COEFFS = [Fraction(k) for k in (-3, -2, -1, 1, 2, 5)] + [Fraction(1, 2), Fraction(-2, 3)]


def rand_monomial(rng, ring, max_deg=2, parity=None):
    while True:
        even = tuple(rng.randint(0, max_deg) for _ in range(ring.n_even))
        k = rng.randint(0, ring.n_odd)
        odd = tuple(sorted(rng.sample(range(ring.n_odd), k)))
        if parity is None or k % 2 == parity:
            return Monomial(even, odd)


def rand_element(rng, ring, terms=3, max_deg=2, parity=None):
    if parity == 1 and not ring.n_odd:
        return ring.zero()
    out = {}
    for _ in range(rng.randint(1, terms)):
        out[rand_monomial(rng, ring, max_deg, parity)] = rng.choice(COEFFS)
    return Element(ring, out)


def rand_form_monomial(rng, ring, max_degree=2):
    dx = tuple(sorted(rng.sample(range(ring.n_even), rng.randint(0, min(ring.n_even, max_degree)))))
    left = max_degree - len(dx)
    dc = tuple(sorted(rng.choice(range(ring.n_odd)) for _ in range(rng.randint(0, left)))) if ring.n_odd else ()
    return FormMonomial(dx, dc)


def _homogeneous_key(rng, ring, bideg, max_deg):
    f, p = bideg
    options = []
    for kc in range(f + 1):
        kx = f - kc
        if kx > ring.n_even or (kc and not ring.n_odd):
            continue
        need = (p - kc) % 2
        sizes = [k for k in range(ring.n_odd + 1) if k % 2 == need]
        if sizes:
            options.append((kx, kc, sizes))
    if not options:
        return None
    kx, kc, sizes = rng.choice(options)
    dx = tuple(sorted(rng.sample(range(ring.n_even), kx)))
    dc = tuple(sorted(rng.randrange(ring.n_odd) for _ in range(kc)))
    odd = tuple(sorted(rng.sample(range(ring.n_odd), rng.choice(sizes))))
    even = tuple(rng.randint(0, max_deg) for _ in range(ring.n_even))
    return Monomial(even, odd), FormMonomial(dx, dc)


def rand_form(rng, ring, terms=3, max_deg=2, bideg=None):
    """Random form; ``bideg`` = (form degree, parity) makes it homogeneous."""
    out = {}
    for _ in range(rng.randint(1, terms)):
        if bideg is None:
            key = (rand_monomial(rng, ring, max_deg), rand_form_monomial(rng, ring))
        else:
            key = _homogeneous_key(rng, ring, bideg, max_deg)
            if key is None:
                break
        out[key] = rng.choice(COEFFS)
    return Form(ring, out)


def rand_derivation(rng, ring, terms=2, max_deg=1, parity=None):
    """Random derivation; with ``parity`` each coefficient is chosen so the
    derivation is homogeneous."""
    ev = []
    for _ in range(ring.n_even):
        p = parity
        ev.append(rand_element(rng, ring, terms, max_deg, p) if rng.random() < 0.7 else ring.zero())
    od = []
    for _ in range(ring.n_odd):
        p = None if parity is None else 1 - parity
        od.append(rand_element(rng, ring, terms, max_deg, p) if rng.random() < 0.7 else ring.zero())
    return GradedDerivation(ring, ev, od)


def small_rings():
    return [RingSpec(n, m, trunc=12) for n in range(4) for m in range(4) if n + m]


@st.composite
def rings(draw, max_even=3, max_odd=3, trunc=12):
    n = draw(st.integers(0, max_even))
    m = draw(st.integers(0 if n else 1, max_odd))
    return RingSpec(n, m, trunc=trunc)


seeds = st.integers(0, 2 ** 32 - 1)


def odd_subsets(m):
    return [s for k in range(m + 1) for s in combinations(range(m), k)]


def rand_expression(rng, ring, depth=3):
    """Random expression text with its value as an oracle word form and a
    bound on its polynomial degree."""
    from oracles import letter, scalar, word_d

    if depth == 0 or rng.random() < 0.3:
        choice = rng.randint(0, 3)
        if choice == 0 or not (ring.n_even or ring.n_odd):
            q = Fraction(rng.randint(0, 9), rng.randint(1, 4))
            text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
            return text, scalar(q), 0
        kinds = [k for k, n in (("x", ring.n_even), ("c", ring.n_odd)) if n]
        kind = rng.choice(kinds)
        i = rng.randint(1, ring.n_even if kind == "x" else ring.n_odd)
        if choice == 3:
            kind = "d" + kind
        return f"{kind}{i}", letter(kind, i - 1), int(kind in ("x", "dx"))
    op = rng.choice("+-*^d")
    if op == "d":
        t, w, deg = rand_expression(rng, ring, depth - 1)
        return f"d({t})", word_d(w), deg
    if op == "^":
        t, w, deg = rand_expression(rng, ring, depth - 1)
        k = rng.randint(1, 3)
        if deg * k > ring.trunc:
            k = 1
        out = w
        for _ in range(k - 1):
            out = out * w
        return f"({t})^{k}", out, deg * k
    (t1, w1, d1), (t2, w2, d2) = rand_expression(rng, ring, depth - 1), rand_expression(rng, ring, depth - 1)
    if op == "*" and d1 + d2 > ring.trunc:
        op = "+"
    if op == "*":
        t1, t2 = (f"({t})" if "+" in t or "-" in t else t for t in (t1, t2))
        return f"{t1}*{t2}", w1 * w2, d1 + d2
    if op == "+":
        return f"{t1} + {t2}", w1 + w2, max(d1, d2)
    return f"{t1} - ({t2})", w1 - w2, max(d1, d2)
