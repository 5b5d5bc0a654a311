import itertools

import numpy as np
import pytest

from kernelsis.baseline import (
    FlatShare,
    shamir_combine,
    shamir_split,
    thienlin_combine,
    thienlin_split,
    wu_combine,
    wu_split,
)
from kernelsis.errors import InsufficientSharesError, InvalidInputError, ParameterError
from kernelsis.synthetic import SMOOTH_KINDS, smooth_image


def row(*values):
    return np.array([values], dtype=np.uint8)


class TestShamir:
    def test_known_shares(self, fixed_random):
        shares = shamir_split(row(5), 2, 2, rng=fixed_random(3))
        assert [s.values.tolist() for s in shares] == [[8], [11]]

    def test_round_trip_clamps(self, rng):
        img = rng.integers(0, 256, size=(6, 7), dtype=np.uint8)
        shares = shamir_split(img, 3, 5, rng=rng)
        out = shamir_combine(shares[2:], 3, 7, 6)
        assert (out == np.minimum(img, 250)).all()

    def test_share_per_pixel(self, rng):
        shares = shamir_split(np.zeros((4, 5), np.uint8), 2, 3, rng=rng)
        assert all(len(s) == 20 for s in shares)


class TestThienLin:
    def test_known_share(self):
        assert thienlin_split(row(2, 3), 2, 2)[0].values.tolist() == [5]

    def test_known_combine(self):
        shares = [FlatShare(1, [5], "thienlin251"), FlatShare(2, [8], "thienlin251")]
        assert thienlin_combine(shares, 2, 2, 1).tolist() == [[2, 3]]

    def test_share_size(self):
        shares = thienlin_split(np.zeros((512, 512), np.uint8), 4, 4)
        assert len(shares[0]) == 65536

    def test_saturated_pixel_clamped(self):
        shares = thienlin_split(row(255, 7), 2, 3)
        assert thienlin_combine(shares, 2, 2, 1).tolist() == [[250, 7]]

    def test_padding_of_last_block(self):
        img = np.arange(7, dtype=np.uint8).reshape(1, 7)
        shares = thienlin_split(img, 3, 3)
        assert len(shares[0]) == 3
        assert (thienlin_combine(shares, 3, 7, 1) == img).all()

    def test_every_k_subset_agrees(self, rng):
        img = np.minimum(rng.integers(0, 256, size=(5, 9), dtype=np.uint8), 250)
        shares = thienlin_split(img, 3, 6)
        for sub in itertools.combinations(shares, 3):
            assert (thienlin_combine(sub, 3, 9, 5) == img).all()


class TestWu:
    def test_known_share(self):
        assert (255 + 255 * 2) % 257 == 251
        assert wu_split(row(255, 255), 2, 2)[1].values.tolist() == [251]

    def test_escape_value_stored_as_zero(self):
        # brute-force a constant block whose share at x=1 is exactly 256
        value, x = next((v, x) for x in range(1, 6) for v in range(256) if v * (1 + x) % 257 == 256)
        shares = wu_split(row(value, value), 2, x + 1)
        assert shares[x - 1].values.tolist() == [0]

    def test_escape_value_resolved(self):
        value = next(v for v in range(256) if v * 2 % 257 == 256)
        img = np.full((4, 4), value, dtype=np.uint8)
        shares = wu_split(img, 2, 3)
        assert (shares[0].values == 0).all()
        assert (wu_combine(shares[:2], 2, 4, 4) == img).all()

    @pytest.mark.parametrize("kind", SMOOTH_KINDS)
    def test_round_trip_smooth(self, kind):
        img = smooth_image(kind, 40, 40)
        shares = wu_split(img, 3, 5)
        assert (wu_combine(shares[1:4], 3, 40, 40) == img).all()

    def test_full_range_kept(self):
        img = row(251, 252, 253, 254, 255, 0)
        assert (wu_combine(wu_split(img, 2, 2), 2, 6, 1) == img).all()

    def test_errors_only_in_ambiguous_blocks(self, rng):
        k = 3
        img = rng.integers(0, 256, size=(30, 30), dtype=np.uint8)
        shares = wu_split(img, k, k)
        out = wu_combine(shares, k, 30, 30)
        ambiguous = (np.stack([s.values for s in shares]) == 0).any(axis=0)
        wrong_blocks = np.unique(np.flatnonzero(out.ravel() != img.ravel()) // k)
        assert ambiguous[wrong_blocks].all()

    def test_stored_shares_are_not_injective(self):
        # k stored bytes cannot always name the block: two blocks can share them
        seen = {}
        collision = None
        for block in itertools.product(range(256), repeat=2):
            stored = wu_split(np.array([block], np.uint8), 2, 2)
            key = tuple(int(s.values[0]) for s in stored)
            if key in seen:
                collision = (seen[key], block)
                break
            seen[key] = block
        assert collision is not None
        a, b = collision
        assert a != b


class TestErrors:
    def test_too_few_shares(self):
        shares = thienlin_split(row(1, 2, 3), 3, 4)
        with pytest.raises(InsufficientSharesError):
            thienlin_combine(shares[:2], 3, 3, 1)

    def test_duplicate_x(self):
        shares = thienlin_split(row(1, 2), 2, 2)
        with pytest.raises(InvalidInputError):
            thienlin_combine([shares[0], shares[0]], 2, 2, 1)

    def test_mixed_modes(self):
        tl = thienlin_split(row(1, 2), 2, 2)
        wu = wu_split(row(1, 2), 2, 2)
        with pytest.raises(InvalidInputError):
            wu_combine([wu[0], tl[1]], 2, 2, 1)

    @pytest.mark.parametrize("k,n", [(1, 3), (4, 3), (2, 251)])
    def test_bad_threshold(self, k, n):
        with pytest.raises(ParameterError):
            thienlin_split(row(1, 2), k, n)

    def test_non_image(self):
        with pytest.raises(InvalidInputError):
            thienlin_split(np.zeros((2, 2, 3), np.uint8), 2, 2)
