import random

import pytest

from knorm.errors import InputError, PrecisionError
from knorm.padic import KummerExtension, LocalField, default_precision


@pytest.fixture(scope="module")
def q2():
    return LocalField(2)


@pytest.fixture(scope="module")
def q3z():
    return LocalField(3, [{"kind": "eisenstein", "coeffs": [3, 3]}])


def test_q2_basic_valuations(q2):
    assert (q2.element(2) + q2.element(2)).valuation() == 2
    assert q2.element(12).valuation() == 2
    assert q2.element(1).valuation() == 0


def test_mul_inverse_roundtrip(q2):
    for n in (1, 3, 5, 7, 17, -9, 2, 6, 40):
        x = q2.element(n)
        assert (x * x.inverse()) == q2.one()


def test_valuation_additivity(q2):
    rng = random.Random(0)
    for _ in range(20):
        a = rng.randrange(-50, 50) or 1
        b = rng.randrange(-50, 50) or 1
        x, y = q2.element(a), q2.element(b)
        assert (x * y).valuation() == x.valuation() + y.valuation()
        s = x + y
        try:
            vs = s.valuation()
            assert vs >= min(x.valuation(), y.valuation())
        except PrecisionError:
            pass  # exact or undetermined zero: a + (-a)


def test_zero_handling(q2):
    z = q2.zero()
    assert z.is_zero()
    with pytest.raises(PrecisionError):
        z.valuation()
    with pytest.raises(PrecisionError):
        z.inverse()


def test_ramified_eisenstein_field():
    f = LocalField(3, [{"kind": "eisenstein", "coeffs": [3, 3]}])
    lam = f.gen()
    assert (lam * lam).valuation() == 2
    assert f.element(3).valuation() == 2
    # lam^2 associates to 3
    assert ((lam * lam) / f.element(3)).valuation() == 0


def test_eisenstein_validation(q2):
    with pytest.raises(InputError):
        LocalField(2, [{"kind": "eisenstein", "coeffs": [4, 0]}])  # v(c0) = 2
    with pytest.raises(InputError):
        LocalField(2, [{"kind": "eisenstein", "coeffs": [2, 1]}])  # middle unit


def test_is_pth_power_q2(q2):
    assert q2.is_pth_power(q2.element(17))
    assert not q2.is_pth_power(q2.element(5))
    assert q2.is_pth_power(q2.element(4))
    assert not q2.is_pth_power(q2.element(2))
    assert not q2.is_pth_power(q2.element(-1))


def test_is_pth_power_properties(q2):
    rng = random.Random(1)
    for _ in range(10):
        n = rng.randrange(1, 60)
        x = q2.element(n)
        assert q2.is_pth_power(x * x)
        u = q2.element(2 * rng.randrange(1, 20) + 1)
        assert q2.is_pth_power(u * x * x) == q2.is_pth_power(u)


def test_pth_power_q3(q3z):
    lam = q3z.gen()
    x = q3z.element(1) + lam
    assert q3z.is_pth_power(x**3)
    assert not q3z.is_pth_power(x)
    assert not q3z.is_pth_power(lam)


def test_teichmueller_q5():
    q5 = LocalField(5)
    w = q5.teichmueller(q5.element(2))
    assert w**4 == q5.one()
    assert (w - q5.element(2)).valuation() >= 1
    assert q5.teichmueller(q5.one()) == q5.one()


def test_teichmueller_q2(q2):
    assert q2.teichmueller(q2.element(7)) == q2.one()
    with pytest.raises(InputError):
        q2.teichmueller(q2.element(2))


def test_has_mu_p_detection():
    assert LocalField(2).has_mu_p
    assert not LocalField(3).has_mu_p
    assert not LocalField(5).has_mu_p
    f = LocalField(3, [{"kind": "eisenstein", "coeffs": [3, 3]}])
    assert f.has_mu_p
    z = f.zeta
    assert z**3 == f.one()
    assert not (z - f.one()).vanishes()


def test_has_mu_p_monotone_up_tower(q3z):
    lam = q3z.gen()
    for a in (lam, q3z.element(1) + lam):
        ext = KummerExtension(q3z, a)
        assert ext.top.has_mu_p
        assert ext.top.zeta**3 == ext.top.one()


def test_kummer_classifications(q2):
    ram = KummerExtension(q2, q2.element(2))
    assert ram.ramified and ram.top.e == 2 and ram.top.f == 1
    unram = KummerExtension(q2, q2.element(5))
    assert not unram.ramified and unram.top.e == 1 and unram.top.f == 2
    wild = KummerExtension(q2, q2.element(-1))
    assert wild.ramified and wild.top.e == 2
    with pytest.raises(InputError):
        KummerExtension(q2, q2.element(17))


def test_norm_examples_sqrt2(q2):
    ext = KummerExtension(q2, q2.element(2))
    A = ext.A
    assert ext.norm_down(A) == q2.element(-2)  # p = 2: N(A) = -a
    assert ext.norm_down(ext.top.element(1) + A) == q2.element(-1)
    assert ext.norm_down(ext.top.element(2) + A) == q2.element(2)


def test_norm_multiplicativity(q2):
    ext = KummerExtension(q2, q2.element(2))
    rng = random.Random(2)
    elts = []
    for _ in range(4):
        c0 = rng.randrange(-9, 10) or 1
        c1 = rng.randrange(-9, 10)
        elts.append(ext.top.element(1) * c0 + ext.A * c1)
    for x in elts:
        for y in elts:
            lhs = ext.norm_down(x * y)
            rhs = ext.norm_down(x) * ext.norm_down(y)
            assert (lhs - rhs).vanishes()


def test_norm_of_base_element_is_pth_power(q2):
    ext = KummerExtension(q2, q2.element(2))
    for n in (3, 5, 7):
        c = q2.element(n)
        assert (ext.norm_down(ext.embed(c)) - c * c).vanishes()


def test_sigma_order_and_action(q3z):
    ext = KummerExtension(q3z, q3z.gen())
    x = ext.A + ext.top.element(7)
    y = ext.sigma(ext.sigma(ext.sigma(x)))
    assert (y - x).vanishes()
    assert (ext.sigma(ext.A) - ext.embed(q3z.zeta) * ext.A).vanishes()


def test_k1_structure_q2(q2):
    labels = [e.label for e in q2.k1_structure()]
    assert labels == ["2", "-1", "5"]
    assert q2.k1_coords(q2.element(17)) == [0, 0, 0]
    assert q2.k1_coords(q2.element(5)) == [0, 0, 1]
    assert q2.k1_coords(q2.element(-1)) == [0, 1, 0]
    assert q2.k1_coords(q2.element(2)) == [1, 0, 0]
    # -20 = (-1) * 5 * 2^2
    assert q2.k1_coords(q2.element(-20)) == [0, 1, 1]


def test_k1_dimension_matches_degree(q2, q3z):
    assert len(q2.k1_structure()) == 3
    assert len(q3z.k1_structure()) == 4
    e = KummerExtension(q2, q2.element(2)).top
    assert len(e.k1_structure()) == 4
    e5 = KummerExtension(q2, q2.element(5)).top
    assert len(e5.k1_structure()) == 4


def test_k1_coords_roundtrip(q3z):
    rng = random.Random(3)
    entries = q3z.k1_structure()
    for _ in range(6):
        coords = [rng.randrange(3) for _ in entries]
        x = q3z.k1_element(coords)
        assert q3z.k1_coords(x) == coords


def test_k1_coords_multiplicative(q2):
    a, b = q2.element(3), q2.element(7)
    ca, cb = q2.k1_coords(a), q2.k1_coords(b)
    cab = q2.k1_coords(a * b)
    assert cab == [(x + y) % 2 for x, y in zip(ca, cb)]


def test_is_pth_power_agrees_with_coords(q3z):
    rng = random.Random(4)
    lam = q3z.gen()
    for _ in range(8):
        x = q3z.element(rng.randrange(1, 20)) + lam * rng.randrange(0, 3)
        if x.vanishes():
            continue
        assert q3z.is_pth_power(x) == (not any(q3z.k1_coords(x)))


def test_precision_policy():
    assert default_precision(2, 1) == 18
    with pytest.raises(InputError):
        LocalField(2, precision=3)


def test_field_spec_parsing():
    f = LocalField.from_spec('{"p": 2, "steps": []}')
    assert f.p == 2 and f.degree == 1
    with pytest.raises(InputError):
        LocalField.from_spec('{"steps": []}')
    with pytest.raises(InputError):
        LocalField.from_spec('{"p": 2, "bogus": 1}')
    with pytest.raises(InputError):
        LocalField.from_spec("not json")
    with pytest.raises(InputError):
        LocalField.from_spec({"p": 4})


def test_cross_field_operations_rejected(q2, q3z):
    with pytest.raises(InputError):
        q2.element(3) + q3z.element(3)  # type: ignore[operator]
