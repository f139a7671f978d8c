import numpy as np
import pytest

from cycleres import signs

# First 64 fractional bits of pi, from the published hex expansion
# 3.243F6A8885A308D3... (independent of any library computation).
PI_FRAC_64 = 0x243F6A8885A308D3


def mpmath_bits(count):
    """Independent arbitrary-precision oracle for fractional pi bits."""
    import mpmath

    with mpmath.workprec(count + 96):
        scaled = int(mpmath.floor(mpmath.ldexp(mpmath.pi, count)))
    frac = scaled - (3 << count)
    return np.array([(frac >> (count - 1 - i)) & 1 for i in range(count)], dtype=np.uint8)


class TestPiBits:
    def test_first_8(self):
        assert list(signs.pi_fraction_bits(8)) == [0, 0, 1, 0, 0, 1, 0, 0]

    def test_first_16(self):
        assert list(signs.pi_fraction_bits(16)) == [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1]

    def test_first_64_hex_constant(self):
        bits = signs.pi_fraction_bits(64)
        value = int("".join(str(b) for b in bits), 2)
        assert value == PI_FRAC_64

    def test_matches_mpmath_oracle_10k(self):
        assert np.array_equal(signs.pi_fraction_bits(10_000), mpmath_bits(10_000))

    def test_prefix_property(self):
        longest = signs.pi_fraction_bits(4096)
        for m in (1, 8, 64, 1024, 4096):
            assert np.array_equal(signs.pi_fraction_bits(m), longest[:m])

    def test_deterministic(self):
        assert np.array_equal(signs.pi_fraction_bits(2000), signs.pi_fraction_bits(2000))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            signs.pi_fraction_bits(0)


class TestTakeSigns:
    def test_pi_first_8(self):
        src = signs.PiSignSource()
        assert list(src.take(8)) == [-1, -1, 1, -1, -1, 1, -1, -1]
        assert src.cursor == 9

    def test_cursor_consistency(self):
        a = signs.PiSignSource()
        first, second = a.take(5), a.take(3)
        whole = signs.PiSignSource().take(8)
        assert list(np.concatenate([first, second])) == list(whole)

    def test_signs_at_absolute(self):
        src = signs.PiSignSource()
        src.take(100)  # cursor moves
        assert np.array_equal(src.signs_at(1, 8), signs.PiSignSource().take(8))
        assert src.cursor == 101

    def test_bernoulli_seed_contract(self):
        a = signs.BernoulliSignSource(42).take(1000)
        b = signs.BernoulliSignSource(42).take(1000)
        assert np.array_equal(a, b)
        c = signs.BernoulliSignSource(43).take(1000)
        assert not np.array_equal(a, c)

    def test_bernoulli_values_and_mean(self):
        m = 10_000
        draw = signs.BernoulliSignSource(7).take(m)
        assert set(np.unique(draw)) <= {-1, 1}
        assert abs(draw.mean()) < 4 / np.sqrt(m)

    def test_pi_values(self):
        assert set(np.unique(signs.PiSignSource().take(5000))) == {-1, 1}


class TestAllocate:
    def test_pi_k1_n4(self):
        alloc = signs.allocate_couplings(signs.PiSignSource(), 1, 4, np.zeros((1, 1)))
        assert list(alloc.v_in[0]) == [-1, -1, 1, -1]   # bits 1..4 = 0010
        assert list(alloc.bias[0]) == [-1, 1, -1, -1]   # bits 5..8 = 0100
        assert alloc.cross == {}

    def test_pi_k2_n2_full_adjacency_consumption(self):
        src = signs.PiSignSource()
        a = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        alloc = signs.allocate_couplings(src, 2, 2, a)
        # V_in: 2 encoders x 2 signs, cross: 2 active pairs x 4 signs = 12 total
        assert src.cursor == 13
        assert set(alloc.cross) == {(0, 1), (1, 0)}
        assert all(m.shape == (2, 2) for m in alloc.cross.values())
        # bias read by absolute position (bits 3..4 for n=2), not the stream
        assert np.array_equal(alloc.bias[0], signs.PiSignSource().signs_at(3, 2))
        assert np.array_equal(alloc.bias[1], alloc.bias[0])

    def test_inactive_pairs_consume_nothing(self):
        src = signs.PiSignSource()
        signs.allocate_couplings(src, 3, 2, np.zeros((3, 3)))
        assert src.cursor == 7  # only the three V_in blocks

    def test_cross_consumption_order_row_major_destination_outer(self):
        # edge (src=2, dst=0) and (src=0, dst=1): destination 0 block first
        a = np.zeros((3, 3), dtype=np.uint8)
        a[2, 0] = 1
        a[0, 1] = 1
        alloc = signs.allocate_couplings(signs.PiSignSource(), 3, 2, a)
        flat_after_vin = signs.PiSignSource()
        flat_after_vin.take(6)
        first_block = flat_after_vin.take(4).reshape(2, 2)
        second_block = flat_after_vin.take(4).reshape(2, 2)
        assert np.array_equal(alloc.cross[(2, 0)], first_block)
        assert np.array_equal(alloc.cross[(0, 1)], second_block)

    def test_bernoulli_allocation_reproducible(self):
        a = np.array([[0, 1], [0, 0]], dtype=np.uint8)
        one = signs.allocate_couplings(signs.BernoulliSignSource(5), 2, 3, a)
        two = signs.allocate_couplings(signs.BernoulliSignSource(5), 2, 3, a)
        assert np.array_equal(one.v_in, two.v_in)
        assert np.array_equal(one.bias, two.bias)
        assert np.array_equal(one.cross[(0, 1)], two.cross[(0, 1)])

    def test_bernoulli_bias_per_encoder(self):
        alloc = signs.allocate_couplings(signs.BernoulliSignSource(5), 2, 64, np.zeros((2, 2)))
        assert not np.array_equal(alloc.bias[0], alloc.bias[1])

    def test_all_outputs_are_signs(self):
        a = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        alloc = signs.allocate_couplings(signs.BernoulliSignSource(1), 2, 8, a)
        for arr in (alloc.v_in, alloc.bias, *alloc.cross.values()):
            assert set(np.unique(arr)) <= {-1, 1}

    def test_pi_mode_full_scale_consumption(self):
        # k=10, n=100 with every edge active: ~0.9M pi bits drawn in order
        k, n = 10, 100
        a = np.ones((k, k), dtype=np.uint8)
        np.fill_diagonal(a, 0)
        src = signs.PiSignSource()
        alloc = signs.allocate_couplings(src, k, n, a)
        assert src.cursor == 1 + k * n + k * (k - 1) * n * n
        assert len(alloc.cross) == k * (k - 1)


def test_make_sign_source():
    assert isinstance(signs.make_sign_source("pi"), signs.PiSignSource)
    assert isinstance(signs.make_sign_source("bernoulli", 1), signs.BernoulliSignSource)
    with pytest.raises(ValueError):
        signs.make_sign_source("e-digits")
