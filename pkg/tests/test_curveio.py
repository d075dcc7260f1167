import math

import numpy as np
import pytest

from se2geo.curveio import CurveFormatError, read_curve_csv, write_curve_csv
from se2geo.flow import FlowState, PendulumState, from_pendulum, integrate
from se2geo.se2 import ConfigPoint


def make_curve(t_final=1.0, dt=1e-3):
    mf = from_pendulum(PendulumState(1.9, -0.3), 0.7)
    return integrate(FlowState(ConfigPoint(0.1, -0.2, 0.4), mf), t_final, dt)


def test_round_trip_identical(tmp_path):
    curve = make_curve()
    path = tmp_path / "curve.csv"
    write_curve_csv(path, curve)
    back = read_curve_csv(path)
    assert np.array_equal(back.samples, curve.samples)
    assert back.energy_initial == curve.energy_initial
    assert back.dt == curve.dt
    assert back.integrator_name == curve.integrator_name
    assert back.energy_drift == curve.energy_drift
    assert back.warnings == curve.warnings


def test_header_and_meta_layout(tmp_path):
    curve = make_curve(t_final=0.01)
    path = tmp_path / "curve.csv"
    write_curve_csv(path, curve)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# energy=")
    assert lines[1].startswith("# dt=")
    assert lines[2] == "# integrator=rk4"
    assert lines[3] == "t,x,y,theta,p1,p2,p3"
    assert len(lines) == 4 + len(curve)


def test_non_uniform_time_names_row(tmp_path):
    curve = make_curve(t_final=0.01)
    path = tmp_path / "curve.csv"
    write_curve_csv(path, curve)
    lines = path.read_text().splitlines()
    parts = lines[7].split(",")
    parts[0] = repr(float(parts[0]) + 4e-4)
    lines[7] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CurveFormatError, match="sample 3"):
        read_curve_csv(path)


def test_bad_header(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("t,x,y\n0,0,0\n")
    with pytest.raises(CurveFormatError, match="header"):
        read_curve_csv(path)


def test_bad_field_count(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("t,x,y,theta,p1,p2,p3\n0,0,0,0,1,0\n")
    with pytest.raises(CurveFormatError, match="line 2"):
        read_curve_csv(path)


def test_non_numeric_field(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("t,x,y,theta,p1,p2,p3\n0,0,zero,0,1,0,0\n")
    with pytest.raises(CurveFormatError, match="line 2"):
        read_curve_csv(path)


def test_empty_file(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("")
    with pytest.raises(CurveFormatError):
        read_curve_csv(path)
