import numpy as np
import pytest

from liftroute import io as fileio
from liftroute.core import Deliver, Instance, MoveEmpty, Pickup, Plan
from liftroute.gen import generate


def test_instance_roundtrip_keeps_coordinates(tmp_path):
    inst = generate(25, 3, seed=11)
    path = tmp_path / "inst.csv"
    fileio.write_instance(path, inst)
    back = fileio.read_instance(path)
    assert path.read_text().splitlines()[0] == "# pdp d=3 n=25"
    np.testing.assert_allclose(back.origins, inst.origins, rtol=1e-12, atol=0)
    np.testing.assert_allclose(back.destinations, inst.destinations, rtol=1e-12, atol=0)


def test_parse_instance_rejects_bad_input():
    with pytest.raises(fileio.FormatError):
        fileio.parse_instance("0.1,0.2\n")
    with pytest.raises(fileio.FormatError):
        fileio.parse_instance("# pdp d=1 n=2\n0.1,0.2\n")
    with pytest.raises(fileio.FormatError):
        fileio.parse_instance("# pdp d=2 n=1\n0.1,0.2,0.3\n")


def test_out_of_cube_warns():
    with pytest.warns(UserWarning):
        fileio.parse_instance("# pdp d=1 n=1\n-0.5,0.2\n")
    inst = fileio.parse_instance("# pdp d=1 n=1\n-0.5,0.2\n", check_cube=False)
    assert inst.origins[0, 0] == -0.5


def test_plan_file_is_one_based():
    p = Plan.from_actions([Pickup(0), Deliver(0), MoveEmpty([0.5, 0.25]), Pickup(1), Deliver(1)], 1)
    text = fileio.format_plan(p)
    assert text.splitlines() == ["P 1", "D 1", "M 0.5 0.25", "P 2", "D 2"]
    back = fileio.parse_plan(text, 1)
    assert back.actions == p.actions


def test_parse_plan_errors():
    with pytest.raises(fileio.FormatError):
        fileio.parse_plan("X 1\n", 1)
    with pytest.raises(fileio.FormatError):
        fileio.parse_plan("P one\n", 1)
