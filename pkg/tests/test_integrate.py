import io

import numpy as np
import pytest

from contactpath.engine import flat_spec, spec_from_dict
from contactpath.errors import SingularArcError
from contactpath.integrate import integrate

INIT3 = {
    "t": 0.0,
    "x0": 0.3,
    "x1": 0.1,
    "x2": -0.2,
    "z": 0.5,
    "u0": 0.7,
    "u1": 0.4,
    "u2": -0.3,
}


def test_flat_spec_conserves_contact_pairing():
    # constant u makes x affine in the parameter and z quadratic, so the
    # scheme is exact up to roundoff
    traj = integrate(flat_spec(3), INIT3, 0.0, 1.0, 1e-3)
    assert len(traj.t) == 1001
    assert np.max(np.abs(traj.contact_residual)) <= 1e-10
    assert np.max(np.abs(traj.secondary_residual)) <= 1e-10
    # x_inf coordinate advances with the parameter when C = 1
    assert abs(traj.states[-1][0] - 1.0) < 1e-12
    # u stays constant
    u_cols = traj.states[:, -3:]
    assert np.max(np.abs(u_cols - u_cols[0])) < 1e-12


def test_linear_f0_spec_conserves_contact_pairing():
    spec = spec_from_dict({"n": 3, "f0": "u1", "f": ["0", "0"]})
    traj = integrate(spec, INIT3, 0.0, 1.0, 1e-3)
    assert np.max(np.abs(traj.contact_residual)) <= 1e-8


def test_order_four_convergence():
    spec = spec_from_dict(
        {"n": 3, "f0": "u1*u2 + x1", "f": ["u2^2 - x2", "u1*x1"]}
    )
    coarse = integrate(spec, INIT3, 0.0, 1.0, 4e-3)
    fine = integrate(spec, INIT3, 0.0, 1.0, 2e-3)
    r_coarse = np.max(np.abs(coarse.contact_residual))
    r_fine = np.max(np.abs(fine.contact_residual))
    ratio = r_coarse / r_fine
    assert 12.0 <= ratio <= 20.0, ratio


def test_singular_arc_detection():
    spec = spec_from_dict({"n": 3, "C": "1 - 2*u1", "f0": "0", "f": ["1", "0"]})
    with pytest.raises(SingularArcError) as err:
        integrate(spec, INIT3, 0.0, 1.0, 1e-3)
    assert 0.0 < err.value.t < 0.2
    assert err.value.state is not None and len(err.value.state) == 8


def test_adaptive_integration_runs():
    spec = spec_from_dict({"n": 3, "f0": "u1*u2", "f": ["u2", "u1"]})
    fixed = integrate(spec, INIT3, 0.0, 1.0, 1e-3)
    adaptive = integrate(spec, INIT3, 0.0, 1.0, 1e-2, adaptive=True, rtol=1e-10)
    assert len(adaptive.t) < len(fixed.t)
    assert abs(adaptive.t[-1] - 1.0) < 1e-12
    # endpoints agree between the two step-control modes
    assert np.max(np.abs(adaptive.states[-1] - fixed.states[-1])) < 1e-7


def test_csv_output_schema():
    traj = integrate(flat_spec(3), INIT3, 0.0, 0.02, 1e-2)
    buf = io.StringIO()
    traj.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "t,x_inf,x0,x1,x2,z,u0,u1,u2,contact_residual,secondary_residual"
    assert len(lines) == 1 + len(traj.t)
    first = lines[1].split(",")
    assert len(first) == 11
    assert float(first[0]) == 0.0
    assert float(first[2]) == 0.3


def test_init_as_sequence_and_validation():
    traj = integrate(flat_spec(3), [0, 0.3, 0.1, -0.2, 0.5, 0.7, 0.4, -0.3], 0.0, 0.01, 1e-2)
    assert len(traj.t) == 2
    with pytest.raises(ValueError):
        integrate(flat_spec(3), [0.0, 1.0], 0.0, 1.0, 1e-2)
    with pytest.raises(ValueError):
        integrate(flat_spec(3), INIT3, 1.0, 0.0, 1e-2)
