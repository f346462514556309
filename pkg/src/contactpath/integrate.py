"""Classical fourth-order integration of contact path systems.

The integral curves satisfy

    x_inf' = C,  x_alpha' = u_alpha C,  z' = C (x0 - u0 x_inf + omega_pq u^p x^q),
    u^p' = f^p,  u^0' = f^0 + omega_pq f^p u^q,

and conserve the contact pairing along exact solutions.  The per-sample
residual columns are computed after the fact from a five-point finite
difference estimate of the velocity, so they converge at the same fourth
order as the scheme itself.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import SingularArcError


@dataclass
class Trajectory:
    spec: object
    t: np.ndarray
    states: np.ndarray           # rows in chart order t(=x_inf), x0.., z, u0..
    contact_residual: np.ndarray
    secondary_residual: np.ndarray

    def header(self):
        m = self.spec.m
        cols = ["t", "x_inf", "x0"] + [f"x{i}" for i in range(1, m + 1)]
        cols += ["z", "u0"] + [f"u{i}" for i in range(1, m + 1)]
        cols += ["contact_residual", "secondary_residual"]
        return cols

    def write_csv(self, path_or_file):
        close = False
        if isinstance(path_or_file, (str, bytes)):
            fh = open(path_or_file, "w", newline="", encoding="utf-8")
            close = True
        else:
            fh = path_or_file
        try:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            for k in range(len(self.t)):
                row = [repr(float(self.t[k]))]
                row += [repr(float(v)) for v in self.states[k]]
                row.append(repr(float(self.contact_residual[k])))
                row.append(repr(float(self.secondary_residual[k])))
                writer.writerow(row)
        finally:
            if close:
                fh.close()


def _compile_rhs(spec):
    chart = spec.chart()
    names = chart.names
    m = spec.m
    om = [[float(x) for x in row] for row in spec.omega]
    c_fn = spec.C.evaluate
    f0_fn = spec.f0.evaluate
    f_fns = [e.evaluate for e in spec.f]
    ix = {nm: i for i, nm in enumerate(names)}
    i_t = ix["t"]
    i_x = [ix["x0"]] + [ix[f"x{i}"] for i in range(1, m + 1)]
    i_z = ix["z"]
    i_u = [ix["u0"]] + [ix[f"u{i}"] for i in range(1, m + 1)]

    def rhs(state):
        env = {nm: state[ix[nm]] for nm in names}
        c = c_fn(env)
        f0 = f0_fn(env)
        fs = [fn(env) for fn in f_fns]
        out = np.zeros(len(names))
        out[i_t] = c
        out[i_x[0]] = env["u0"] * c
        for p in range(1, m + 1):
            out[i_x[p]] = env[f"u{p}"] * c
        acc = env["x0"] - env["u0"] * env["t"]
        for p in range(1, m + 1):
            for q in range(1, m + 1):
                if om[p - 1][q - 1]:
                    acc += om[p - 1][q - 1] * env[f"u{p}"] * env[f"x{q}"]
        out[i_z] = c * acc
        du0 = f0
        for p in range(1, m + 1):
            for q in range(1, m + 1):
                if om[p - 1][q - 1]:
                    du0 += om[p - 1][q - 1] * fs[p - 1] * env[f"u{q}"]
        out[i_u[0]] = du0
        for p in range(1, m + 1):
            out[i_u[p]] = fs[p - 1]
        return out, c

    return rhs


def _rk4_step(rhs, state, h):
    k1, c = rhs(state)
    k2, _ = rhs(state + 0.5 * h * k1)
    k3, _ = rhs(state + 0.5 * h * k2)
    k4, _ = rhs(state + h * k3)
    return state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), c


def _fd_weights(ts, t0):
    """Derivative weights at t0 for Lagrange interpolation through nodes ts."""
    k = len(ts)
    weights = np.zeros(k)
    for i in range(k):
        # derivative of the i-th Lagrange basis polynomial at t0
        total = 0.0
        denom = 1.0
        for j in range(k):
            if j != i:
                denom *= ts[i] - ts[j]
        for j in range(k):
            if j == i:
                continue
            prod = 1.0
            for l in range(k):
                if l != i and l != j:
                    prod *= t0 - ts[l]
            total += prod
        weights[i] = total / denom
    return weights


def _residuals(spec, ts, states):
    """Contact pairings of the finite-difference velocity, per sample."""
    m = spec.m
    om = [[float(x) for x in row] for row in spec.omega]
    npts = len(ts)
    contact = np.zeros(npts)
    secondary = np.zeros(npts)
    if npts < 5:
        return contact, secondary
    chart = spec.chart()
    ix = {nm: i for i, nm in enumerate(chart.names)}
    for k in range(npts):
        lo = min(max(k - 2, 0), npts - 5)
        nodes = list(range(lo, lo + 5))
        w = _fd_weights(ts[nodes], ts[k])
        vel = w @ states[nodes]
        st = states[k]

        def coord(nm):
            return st[ix[nm]]

        def dcoord(nm):
            return vel[ix[nm]]

        # theta = dz + t dx0 - x0 dt + omega_pq x^p dx^q
        val = dcoord("z") + coord("t") * dcoord("x0") - coord("x0") * dcoord("t")
        for p in range(1, m + 1):
            for q in range(1, m + 1):
                if om[p - 1][q - 1]:
                    val += om[p - 1][q - 1] * coord(f"x{p}") * dcoord(f"x{q}")
        contact[k] = val
        # theta(-1,-2) = dx0 - u0 dt + omega_pq u^p dx^q
        val = dcoord("x0") - coord("u0") * dcoord("t")
        for p in range(1, m + 1):
            for q in range(1, m + 1):
                if om[p - 1][q - 1]:
                    val += om[p - 1][q - 1] * coord(f"u{p}") * dcoord(f"x{q}")
        secondary[k] = val
    return contact, secondary


def integrate(spec, init, t0, t1, step, adaptive=False, rtol=1e-9, atol=1e-12, c_min=1e-8):
    """Integrate the generating field from a full coordinate point.

    `init` is a point dict or a sequence in chart order.  Fixed-step uses the
    classical fourth-order scheme; adaptive mode controls the error by step
    doubling.  Stops with SingularArcError if C falls below c_min along the
    arc, carrying the last good state.  When C = 1 identically the x_inf
    coordinate advances with the parameter, matching the usual normalization.
    """
    chart = spec.chart()
    if isinstance(init, dict):
        state = np.array([float(init[nm]) for nm in chart.names])
    else:
        init = list(init)
        if len(init) != chart.dim:
            raise ValueError(f"init must supply {chart.dim} coordinates")
        state = np.array([float(v) for v in init])
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    rhs = _compile_rhs(spec)
    _, c0 = rhs(state)
    if abs(c0) < c_min:
        raise SingularArcError("C vanishes at the initial point", t0, state.copy())
    ts = [t0]
    states = [state.copy()]
    t = t0
    h = float(step)
    h_floor = 1e-13 * (t1 - t0)
    while t < t1 - 1e-14:
        h_eff = min(h, t1 - t)
        if h_eff < h_floor:
            raise RuntimeError(f"step size underflow near t = {t}")
        if not adaptive:
            state = _step_checked(rhs, state, h_eff, t, c_min)
            t += h_eff
            ts.append(t)
            states.append(state.copy())
            continue
        # step doubling: full step vs two half steps
        full, _ = _rk4_step(rhs, state, h_eff)
        half, _ = _rk4_step(rhs, state, h_eff / 2)
        two_half, c = _rk4_step(rhs, half, h_eff / 2)
        err = np.max(np.abs(two_half - full) / (atol + rtol * np.maximum(np.abs(two_half), 1.0)))
        if err <= 15.0:
            if abs(c) < c_min:
                raise SingularArcError("C vanished along the arc", t, state.copy())
            t += h_eff
            state = two_half + (two_half - full) / 15.0
            ts.append(t)
            states.append(state.copy())
        factor = 0.9 * (15.0 / err) ** 0.2 if err > 0 else 4.0
        h = h_eff * min(4.0, max(0.1, factor))
    ts = np.array(ts)
    states = np.array(states)
    contact, secondary = _residuals(spec, ts, states)
    return Trajectory(spec, ts, states, contact, secondary)


def _step_checked(rhs, state, h, t, c_min):
    new_state, c = _rk4_step(rhs, state, h)
    _, c_new = rhs(new_state)
    if abs(c_new) < c_min or abs(c) < c_min:
        raise SingularArcError("C vanished along the arc", t, state.copy())
    return new_state
