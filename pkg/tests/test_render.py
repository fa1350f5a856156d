import numpy as np
import pytest

from percolab.render import (bond_pixels, open_bonds, read_ppm, render_ascii,
                             render_image, render_ppm)


def test_ppm_header_and_size():
    data = render_ppm(3, 0.5, 1, cell=4)
    assert data.startswith(b"P6\n28 28\n255\n")
    assert read_ppm(data).shape == (28, 28, 3)


def test_read_ppm_round_trip():
    img = render_image(4, 0.6, 2, cell=3)
    assert np.array_equal(read_ppm(render_ppm(4, 0.6, 2, cell=3)), img)


@pytest.mark.parametrize("bad", [b"P3\n1 1\n255\n\x00\x00\x00", b"P6\n2 2\n255\n\x00", b"P6\n"])
def test_read_ppm_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        read_ppm(bad)


def test_bond_count_monotone():
    counts = [len(open_bonds(10, p, 7)) for p in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert counts == sorted(counts)
    assert len(open_bonds(10, 1.0, 7)) == 2 * 20 * 21


def test_every_open_bond_is_drawn():
    img = render_image(2, 1.0, 0, cell=4)
    assert bond_pixels(img) > 0
    assert np.all(img[2, 2:18] != 255)  # top row fully joined


def test_ascii():
    art = render_ascii(1, 1.0, 0)
    assert art == "+-+-+\n| | |\n+-+-+\n| | |\n+-+-+\n"
    assert render_ascii(1, 0.0, 0) == "+ + +\n\n+ + +\n\n+ + +\n"


def test_cell_too_small():
    with pytest.raises(ValueError):
        render_image(2, 0.5, 0, cell=1)


def test_only_planar():
    with pytest.raises(ValueError):
        open_bonds(2, 0.5, 0, d=3)
