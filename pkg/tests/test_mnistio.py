import struct

import numpy as np
import pytest

from sparselad.mnistio import (IDX_IMAGES_MAGIC, IdxImages, MagicMismatch,
                               TrailingData, Truncated, image_to_signal,
                               load_idx_images, parse_idx_images,
                               serialize_idx_images)

# 20-byte fixture: magic, one 2x2 image, pixels [0, 255, 0, 128]
FIXTURE = struct.pack(">IIII", IDX_IMAGES_MAGIC, 1, 2, 2) + bytes([0, 255, 0, 128])


class TestParse:
    def test_fixture_fields(self):
        imgs = parse_idx_images(FIXTURE)
        assert (imgs.count, imgs.rows, imgs.cols) == (1, 2, 2)
        assert np.array_equal(imgs.pixels, [0, 255, 0, 128])

    def test_magic_mismatch(self):
        bad = struct.pack(">IIII", 0x00000801, 1, 2, 2) + bytes(4)
        with pytest.raises(MagicMismatch):
            parse_idx_images(bad)

    def test_truncated_pixels(self):
        with pytest.raises(Truncated):
            parse_idx_images(FIXTURE[:-1])

    def test_truncated_header(self):
        with pytest.raises(Truncated):
            parse_idx_images(FIXTURE[:10])

    def test_trailing_data(self):
        with pytest.raises(TrailingData):
            parse_idx_images(FIXTURE + b"\x00")

    def test_round_trip_bit_identical(self):
        assert serialize_idx_images(parse_idx_images(FIXTURE)) == FIXTURE

    def test_round_trip_larger(self):
        rng = np.random.default_rng(0)
        pixels = rng.integers(0, 256, size=3 * 4 * 5, dtype=np.uint8)
        blob = struct.pack(">IIII", IDX_IMAGES_MAGIC, 3, 4, 5) + pixels.tobytes()
        assert serialize_idx_images(parse_idx_images(blob)) == blob

    def test_image_accessor(self):
        imgs = parse_idx_images(FIXTURE)
        assert np.array_equal(imgs.image(0), [[0, 255], [0, 128]])
        with pytest.raises(IndexError):
            imgs.image(1)

    def test_load_adds_path_context(self, tmp_path):
        path = tmp_path / "bad.idx"
        path.write_bytes(b"\x00\x00\x08\x01" + bytes(12))
        with pytest.raises(MagicMismatch, match="bad.idx"):
            load_idx_images(path)


class TestImageToSignal:
    def test_all_zero(self):
        signal, s = image_to_signal(np.zeros((2, 2), dtype=np.uint8))
        assert np.array_equal(signal, np.zeros(4))
        assert s == 0

    def test_single_full_pixel(self):
        img = np.zeros((2, 2), dtype=np.uint8)
        img[1, 0] = 255
        signal, s = image_to_signal(img)
        assert s == 1
        assert signal[2] == 1.0

    def test_fixture_scaling(self):
        imgs = parse_idx_images(FIXTURE)
        signal, s = image_to_signal(imgs.image(0))
        assert np.array_equal(signal, [0.0, 1.0, 0.0, 128 / 255])
        assert s == 2

    def test_sparsity_equals_l0(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=(6, 7), dtype=np.uint8)
        signal, s = image_to_signal(img)
        assert s == np.count_nonzero(signal)


def test_dataclass_shape():
    imgs = IdxImages(count=1, rows=2, cols=2, pixels=np.zeros(4, dtype=np.uint8))
    assert imgs.image(0).shape == (2, 2)
