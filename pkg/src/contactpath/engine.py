"""Analysis engine for user-supplied contact path ODE systems.

An ODESpec fixes n, the skew matrix omega, and expressions C, f0, f^i; the
generating field is X = C T(-1,0) + f0 T(0,-2) + f^p A_p in the flat-model
frame.  Torsion computations normalize by C (the span of X is what matters,
and the torsion tensor of X rescales by C^2), so all closed forms below are
stated for the normalized field; for the default C = 1 they coincide with
the raw data.

Symbolic work happens on polynomial components whenever the spec allows it
and falls back to expression trees otherwise; pointwise reductions are exact
on rational data and QR/SVD-based with tolerance 1e-9 on floats.
"""

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from random import Random

import numpy as np

from . import expr as ex
from . import flat_model as fm
from .errors import (
    DegeneratePointError,
    SpecFormatError,
    TorsionPreconditionError,
)
from .exactlinalg import inverse as exact_inverse
from .exactlinalg import rank as exact_rank
from .graded_sp import standard_omega
from .poly import Polynomial

RANK_TOL = 1e-9


# --- spec ------------------------------------------------------------------

@dataclass(frozen=True)
class ODESpec:
    n: int
    omega: tuple          # (2n-4) x (2n-4) skew nondegenerate, Fractions
    C: object             # Expr
    f0: object            # Expr
    f: tuple              # 2n-4 Exprs

    @property
    def m(self):
        return 2 * self.n - 4

    def chart(self):
        return fm.projective_chart(self.n)

    def variables(self):
        return list(self.chart().names)

    def to_dict(self):
        return {
            "n": self.n,
            "omega": [[str(x) if x.denominator != 1 else int(x) for x in row] for row in self.omega],
            "C": str(self.C),
            "f0": str(self.f0),
            "f": [str(e) for e in self.f],
        }


def _parse_rational(x):
    if isinstance(x, bool):
        raise SpecFormatError(f"invalid rational entry {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise SpecFormatError(f"invalid rational entry {x!r}") from e
    raise SpecFormatError(f"invalid rational entry {x!r}")


def spec_from_dict(data):
    if not isinstance(data, dict):
        raise SpecFormatError("spec must be a JSON object")
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError):
        raise SpecFormatError("spec requires an integer field 'n'") from None
    if n < 3:
        raise SpecFormatError(f"n must be >= 3, got {n}")
    m = 2 * n - 4
    if "omega" in data:
        om_rows = data["omega"]
        if len(om_rows) != m or any(len(r) != m for r in om_rows):
            raise SpecFormatError(f"omega must be {m}x{m}")
        omega = [[_parse_rational(x) for x in row] for row in om_rows]
    else:
        omega = standard_omega(m)
    for i in range(m):
        for j in range(m):
            if omega[i][j] != -omega[j][i]:
                raise SpecFormatError("omega must be skew-symmetric")
    if exact_rank(omega) != m:
        raise SpecFormatError("omega must be nondegenerate")
    variables = fm.projective_chart(n).names
    try:
        c_expr = ex.parse(str(data.get("C", "1")), variables)
        f0_expr = ex.parse(str(data["f0"]), variables)
        f_list = data["f"]
        if len(f_list) != m:
            raise SpecFormatError(f"f must have {m} entries")
        f_exprs = tuple(ex.parse(str(s), variables) for s in f_list)
    except KeyError as e:
        raise SpecFormatError(f"missing field {e.args[0]!r}") from None
    c_poly = c_expr.as_polynomial()
    if c_poly is not None and c_poly.is_zero():
        raise SpecFormatError("C must not vanish identically")
    return ODESpec(n, tuple(tuple(row) for row in omega), c_expr, f0_expr, f_exprs)


def load_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SpecFormatError(f"not valid JSON: {e}") from e
    return spec_from_dict(data)


def flat_spec(n):
    return spec_from_dict({"n": n, "f0": "0", "f": ["0"] * (2 * n - 4)})


# --- normalized data and cached geometry -------------------------------------

def _to_ring(e):
    """Polynomial form when the expression allows it, else the tree itself."""
    p = e.as_polynomial()
    return p if p is not None else e


def _ring_zero(x):
    if isinstance(x, Polynomial):
        return x.is_zero()
    if isinstance(x, ex.Expr):
        s = ex.simplify(x)
        return isinstance(s, ex.Num) and s.value == 0
    return x == 0


def _field_map_to_expr(fields):
    out = {}
    for key, vf in fields.items():
        comps = {}
        for coord, comp in vf.components.items():
            comps[coord] = ex.poly_to_expr(comp) if isinstance(comp, Polynomial) else comp
        out[key] = fm.VectorField(comps)
    return out


class Geometry:
    """Per-spec cache of frame fields, normalized data, and brackets."""

    def __init__(self, spec):
        self.spec = spec
        self.n = spec.n
        self.m = spec.m
        self.chart = spec.chart()
        self.omega = [list(row) for row in spec.omega]
        self.omega_upper = [[-v for v in row] for row in exact_inverse(self.omega)]
        c_ring = _to_ring(spec.C)
        f0_ring = _to_ring(spec.f0)
        f_ring = [_to_ring(e) for e in spec.f]
        self.polynomial = all(
            isinstance(r, Polynomial) for r in [c_ring, f0_ring, *f_ring]
        )
        c_is_one = (
            isinstance(c_ring, Polynomial)
            and c_ring.is_constant()
            and not c_ring.is_zero()
            and c_ring.constant_value() == 1
        )
        c_const = (
            isinstance(c_ring, Polynomial)
            and c_ring.is_constant()
            and not c_ring.is_zero()
        )
        if c_is_one:
            self.f0_hat = f0_ring
            self.f_hat = list(f_ring)
        elif c_const:
            inv = Fraction(1) / c_ring.constant_value()
            self.f0_hat = f0_ring * inv if isinstance(f0_ring, Polynomial) else f0_ring * ex.Num(inv)
            self.f_hat = [f * inv if isinstance(f, Polynomial) else f * ex.Num(inv) for f in f_ring]
        else:
            # general C: torsion data lives on the normalized span of X
            c_expr = spec.C
            self.polynomial = False
            self.f0_hat = spec.f0 / c_expr
            self.f_hat = [f / c_expr for f in spec.f]
        self.c_ring = c_ring
        frame = fm.frame(self.n, self.omega)
        if not self.polynomial:
            frame = _field_map_to_expr(frame)
            self.f0_hat = self.f0_hat if isinstance(self.f0_hat, ex.Expr) else ex.poly_to_expr(self.f0_hat)
            self.f_hat = [f if isinstance(f, ex.Expr) else ex.poly_to_expr(f) for f in self.f_hat]
            cf = fm.coframe(self.n, self.omega)
            self.coframe = {
                k: fm.OneForm({c: ex.poly_to_expr(v) for c, v in form.components.items()})
                for k, form in cf.items()
            }
        else:
            self.coframe = fm.coframe(self.n, self.omega)
        self.frame = frame
        self._cache = {}

    # normalized generating field X_hat = T(-1,0) + f0_hat T(0,-2) + f_hat^p A_p
    def x_hat(self):
        if "x_hat" not in self._cache:
            x = self.frame["T(-1,0)"] + self.frame["T(0,-2)"].scale(self.f0_hat)
            for p in range(1, self.m + 1):
                x = x + self.frame[f"A{p}"].scale(self.f_hat[p - 1])
            self._cache["x_hat"] = x
        return self._cache["x_hat"]

    def x_raw(self):
        if "x_raw" not in self._cache:
            f0_ring = _to_ring(self.spec.f0) if self.polynomial else self.spec.f0
            x = self.frame["T(-1,0)"].scale(self.c_ring if self.polynomial else self.spec.C)
            x = x + self.frame["T(0,-2)"].scale(f0_ring)
            for p in range(1, self.m + 1):
                fp = _to_ring(self.spec.f[p - 1]) if self.polynomial else self.spec.f[p - 1]
                x = x + self.frame[f"A{p}"].scale(fp)
            self._cache["x_raw"] = x
        return self._cache["x_raw"]

    def a_field(self, i):
        return self.frame[f"A{i}"]

    def ai_xhat(self, i):
        key = ("ai_x", i)
        if key not in self._cache:
            self._cache[key] = fm.lie_bracket(self.a_field(i), self.x_hat())
        return self._cache[key]

    def double_bracket(self, i):
        """[[A_i, X], X] for the normalized field."""
        key = ("aixx", i)
        if key not in self._cache:
            self._cache[key] = fm.lie_bracket(self.ai_xhat(i), self.x_hat())
        return self._cache[key]

    def secondary_bracket(self, i):
        """[X, [X, A_i]] for the normalized field."""
        key = ("xxa", i)
        if key not in self._cache:
            inner = fm.lie_bracket(self.x_hat(), self.a_field(i))
            self._cache[key] = fm.lie_bracket(self.x_hat(), inner)
        return self._cache[key]

    def filtration_fields(self):
        """Symbolic spanning fields for every filtration subbundle, cached."""
        if "filtration" not in self._cache:
            m = self.m
            A = [self.a_field(i) for i in range(1, m + 1)]
            T02 = self.frame["T(0,-2)"]
            Tm10 = self.frame["T(-1,0)"]
            E = [self.frame[f"E{i}"] for i in range(1, m + 1)]
            Tm1m2 = self.frame["T(-1,-2)"]
            X = self.x_hat()
            AX = [self.ai_xhat(i) for i in range(1, m + 1)]
            e_gens = A + [T02, X]
            bracket_fields = []
            for i, gi in enumerate(e_gens):
                for gj in e_gens[i + 1:]:
                    bracket_fields.append(fm.lie_bracket(gi, gj))
            partial_e = e_gens + bracket_fields
            second = [fm.lie_bracket(gi, h) for gi in e_gens for h in partial_e]
            self._cache["filtration"] = {
                "u": A,
                "v": A + [T02],
                "e": A + [T02, X],
                "partial_uw": A + [X] + AX,
                "e_perp": A + [T02, Tm10] + E,
                "h": A + [T02, Tm10, Tm1m2] + E,
                "partial_e": partial_e,
                "partial2_e": partial_e + second,
            }
        return self._cache["filtration"]

    def nu_form(self):
        """i(X) d(i(X) d theta(-1,-2)), the characteristic-system functional."""
        if "nu" not in self._cache:
            x_hat = self.x_hat()
            mu = self.coframe["theta(-1,-2)"].d().interior(x_hat)
            self._cache["nu"] = mu.d().interior(x_hat)
        return self._cache["nu"]

    def dbeta_matrix(self, r, s):
        """Coordinate matrix of d(r theta(-2,-2) + s theta(-1,-2)); constant."""
        key = ("dbeta", Fraction(r) if not isinstance(r, float) else r,
               Fraction(s) if not isinstance(s, float) else s)
        if key not in self._cache:
            dim = self.chart.dim
            idx = {nm: i for i, nm in enumerate(self.chart.names)}
            out = np.zeros((dim, dim))
            for form, coef in (
                (self.coframe["theta(-2,-2)"].d(), float(r)),
                (self.coframe["theta(-1,-2)"].d(), float(s)),
            ):
                for (a, b), comp in form.components.items():
                    if isinstance(comp, Polynomial):
                        if not comp.is_constant():
                            raise DegeneratePointError("dbeta is not constant for this omega")
                        val = float(comp.constant_value())
                    else:
                        val = float(comp.evaluate({}))
                    out[idx[a], idx[b]] += coef * val
                    out[idx[b], idx[a]] -= coef * val
            self._cache[key] = out
        return self._cache[key]

    def lower(self, vec):
        """f_i = f^p omega_{pi}."""
        out = []
        for i in range(1, self.m + 1):
            acc = None
            for p in range(1, self.m + 1):
                w = self.omega[p - 1][i - 1]
                if not w:
                    continue
                term = vec[p - 1] * w
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else Polynomial() if self.polynomial else ex.Num(Fraction(0)))
        return out

    def raise_index(self, vec):
        """tau^i = omega^{ip} tau_p with omega^{ip} omega_{pj} = -delta^i_j."""
        out = []
        for i in range(1, self.m + 1):
            acc = None
            for p in range(1, self.m + 1):
                w = self.omega_upper[i - 1][p - 1]
                if not w:
                    continue
                term = vec[p - 1] * w
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else Polynomial() if self.polynomial else ex.Num(Fraction(0)))
        return out

    def eval_field(self, field, point):
        vals = field.evaluate(self.chart, point)
        return np.array([float(v) for v in vals])

    def c_value(self, point):
        return float(self.spec.C.evaluate(point))


def geometry(spec):
    # specs are frozen; geometry is cached on the instance sneakily via dict id
    cache = _GEOMETRY_CACHE
    key = id(spec)
    got = cache.get(key)
    if got is None or got.spec is not spec:
        got = Geometry(spec)
        cache[key] = got
        if len(cache) > 128:
            cache.pop(next(iter(cache)))
    return got


_GEOMETRY_CACHE = {}


def generating_field(spec):
    """X = C T(-1,0) + f0 T(0,-2) + f^p A_p in the flat-model frame."""
    return geometry(spec).x_raw()


# --- contact torsion ----------------------------------------------------------

@dataclass(frozen=True)
class TorsionReport:
    tau: tuple            # Exprs, one per lowered index
    is_zero: str          # proved-zero | proved-nonzero | undetermined
    witness: object       # point dict where some tau_i != 0, when nonzero
    tau_ring: tuple       # internal ring elements (Polynomial or Expr)
    bracket_tau: tuple    # same components computed through double brackets

    PROVED_ZERO = "proved-zero"
    PROVED_NONZERO = "proved-nonzero"
    UNDETERMINED = "undetermined"


def seeded_points(spec, count, seed=42, avoid_c_zero=True):
    """Deterministic rational sample points in the chart of a spec."""
    rng = Random(seed)
    chart = spec.chart()
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 200 * count + 200:
            raise DegeneratePointError("could not sample points with C != 0")
        pt = {
            nm: Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3)))
            for nm in chart.names
        }
        if avoid_c_zero:
            try:
                cv = spec.C.evaluate(pt)
            except ex.ExprError:
                continue
            if cv == 0 or (isinstance(cv, float) and abs(cv) < 1e-9):
                continue
        points.append(pt)
    return points


def _a_derivative(geo, func, i):
    """A_i applied to a scalar: d/du^i + omega_{ip} u^p d/du^0."""
    return geo.a_field(i).apply(func)


def contact_torsion(spec, seed=42):
    """Contact torsion through the closed form, cross-checked by brackets.

    tau_i = 3 f_i + A_i(f0) for the C-normalized data; the same components
    are recomputed as the theta(-1,-2) pairing of [[A_i, X], X] and the two
    routes must agree identically.
    """
    geo = geometry(spec)
    f_low = geo.lower(geo.f_hat)
    tau = []
    for i in range(1, geo.m + 1):
        tau.append(3 * f_low[i - 1] + _a_derivative(geo, geo.f0_hat, i))
    bracket_tau = []
    th = geo.coframe["theta(-1,-2)"]
    th_contact = geo.coframe["theta(-2,-2)"]
    for i in range(1, geo.m + 1):
        b = geo.double_bracket(i)
        bracket_tau.append(th.pair(b))
        contact_part = th_contact.pair(b)
        if geo.polynomial and not _ring_zero(contact_part):
            raise DegeneratePointError("double bracket escaped the contact hyperplane")
    if geo.polynomial:
        for a, b in zip(tau, bracket_tau):
            if not (a - b).is_zero():
                raise TorsionPreconditionError(
                    "closed-form and bracket torsion disagree; check omega conventions"
                )
    is_zero, witness = _decide_zero(spec, tau, geo, seed)
    tau_exprs = tuple(
        ex.poly_to_expr(t) if isinstance(t, Polynomial) else ex.simplify(t) for t in tau
    )
    return TorsionReport(tau_exprs, is_zero, witness, tuple(tau), tuple(bracket_tau))


def _decide_zero(spec, tau, geo, seed):
    if geo.polynomial:
        if all(t.is_zero() for t in tau):
            return TorsionReport.PROVED_ZERO, None
        for pt in seeded_points(spec, 40, seed=seed):
            vals = [t.evaluate(pt) for t in tau]
            if any(v != 0 for v in vals):
                return TorsionReport.PROVED_NONZERO, pt
        return TorsionReport.PROVED_NONZERO, None
    worst = 0.0
    witness = None
    for pt in seeded_points(spec, 20, seed=seed):
        fpt = {k: float(v) for k, v in pt.items()}
        try:
            vals = [abs(float(t.evaluate(fpt))) for t in tau]
        except ex.ExprError:
            continue
        big = max(vals) if vals else 0.0
        if big > worst:
            worst, witness = big, pt
    if worst > 1e-9:
        return TorsionReport.PROVED_NONZERO, witness
    return TorsionReport.UNDETERMINED, None


def torsion_point_reduction(spec, point):
    """Rank-based torsion extraction at a point: reduce [[A_i, X], X] modulo
    span{A_j, T(0,-2), X, E_j} and read the T(-1,-2) coefficient."""
    geo = geometry(spec)
    try:
        cval = spec.C.evaluate(point)
    except ex.ExprError:
        cval = 0
    if cval == 0 or (isinstance(cval, float) and abs(cval) < RANK_TOL):
        raise DegeneratePointError("C vanishes at the requested point")
    exact = geo.polynomial and all(isinstance(v, (int, Fraction)) for v in point.values())
    span_fields = (
        [geo.a_field(j) for j in range(1, geo.m + 1)]
        + [geo.frame["T(0,-2)"], geo.x_hat()]
        + [geo.frame[f"E{j}"] for j in range(1, geo.m + 1)]
    )
    tail = [geo.frame["T(-1,-2)"], geo.frame["T(-2,-2)"]]
    if exact:
        cols = [f.evaluate(geo.chart, point) for f in span_fields + tail]
        mat = [list(col) for col in zip(*cols)]
        if exact_rank([row[: len(span_fields)] for row in mat]) != 4 * geo.n - 6:
            raise DegeneratePointError("reduction span lost rank (C vanishes here?)")
        out = []
        from .exactlinalg import solve as exact_solve

        for i in range(1, geo.m + 1):
            b = geo.double_bracket(i).evaluate(geo.chart, point)
            coeffs = exact_solve(mat, list(b))
            if coeffs is None:
                raise DegeneratePointError("double bracket not in the tangent span")
            out.append(coeffs[len(span_fields)])
        return out
    cols = [geo.eval_field(f, point) for f in span_fields + tail]
    mat = np.column_stack(cols)
    if np.linalg.matrix_rank(mat[:, : len(span_fields)], tol=RANK_TOL) != 4 * geo.n - 6:
        raise DegeneratePointError("reduction span lost rank (C vanishes here?)")
    out = []
    for i in range(1, geo.m + 1):
        b = geo.eval_field(geo.double_bracket(i), point)
        coeffs, *_ = np.linalg.lstsq(mat, b, rcond=None)
        out.append(float(coeffs[len(span_fields)]))
    return out


def torsion_free_representative(spec, seed=42):
    """The unique spec with the same contact data and vanishing torsion.

    Replaces f^i by f^i - (C/3) tau^i, where tau is the normalized torsion
    and the index is raised with omega; idempotent by construction.
    """
    geo = geometry(spec)
    report = contact_torsion(spec, seed=seed)
    tau_up = geo.raise_index(list(report.tau_ring))
    third = Fraction(1, 3)
    new_f = []
    for p in range(1, geo.m + 1):
        correction = tau_up[p - 1]
        if geo.polynomial:
            newf = _to_ring(spec.f[p - 1]) - geo.c_ring * correction * third
            new_f.append(ex.poly_to_expr(newf))
        else:
            newf = spec.f[p - 1] - spec.C * correction * ex.Num(third)
            new_f.append(ex.simplify(newf))
    return replace(spec, f=tuple(new_f))


# --- filtration ranks -----------------------------------------------------------

@dataclass(frozen=True)
class RankTable:
    u: int
    v: int
    e: int
    partial_uw: int
    e_perp: int
    h: int
    partial_e: int
    partial2_e: int

    def as_tuple(self):
        return (
            self.u,
            self.v,
            self.e,
            self.partial_uw,
            self.e_perp,
            self.h,
            self.partial_e,
            self.partial2_e,
        )

    @staticmethod
    def expected(n):
        return (
            2 * n - 4,
            2 * n - 3,
            2 * n - 2,
            4 * n - 7,
            4 * n - 6,
            4 * n - 5,
            4 * n - 5,
            4 * n - 4,
        )


def _nrank(vectors, tol=RANK_TOL):
    if not vectors:
        return 0
    return int(np.linalg.matrix_rank(np.column_stack(vectors), tol=tol))


def filtration_ranks(spec, point, tol=RANK_TOL):
    """Numeric ranks at a point of the canonical filtration subbundles."""
    geo = geometry(spec)
    if abs(geo.c_value(point)) < tol:
        raise DegeneratePointError("C vanishes at the requested point")
    fpoint = {k: float(v) for k, v in point.items()}
    fields = geo.filtration_fields()
    vals = {
        key: [geo.eval_field(f, fpoint) for f in flist]
        for key, flist in fields.items()
    }
    return RankTable(**{key: _nrank(v, tol) for key, v in vals.items()})


def semiregular_ranks(spec, point, tol=RANK_TOL):
    """Ranks showing the splitting line and verticals generate the filtration.

    Returns the ranks of the iterated bracket spans of T^{-1} = U + W:
    expected (4n-6, 4n-5, 4n-4), i.e. the next three filtration levels.
    """
    geo = geometry(spec)
    if abs(geo.c_value(point)) < tol:
        raise DegeneratePointError("C vanishes at the requested point")
    fpoint = {k: float(v) for k, v in point.items()}
    key = "semiregular"
    if key not in geo._cache:
        gens = [geo.a_field(i) for i in range(1, geo.m + 1)] + [geo.x_hat()]
        level1 = list(gens)
        for i, gi in enumerate(gens):
            for gj in gens[i + 1:]:
                level1.append(fm.lie_bracket(gi, gj))
        level2 = list(level1)
        for gi in gens:
            for h in level1:
                level2.append(fm.lie_bracket(gi, h))
        level3 = list(level2)
        for gi in gens:
            for h in level2[len(level1):]:
                level3.append(fm.lie_bracket(gi, h))
        geo._cache[key] = (level1, level2, level3)
    spans = geo._cache[key]
    return tuple(
        _nrank([geo.eval_field(f, fpoint) for f in span], tol) for span in spans
    )


def vertical_escape(spec, point, tol=RANK_TOL):
    """True when T(0,-2) is not contained in the span of A_i, X, [A_i, X]."""
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    A = [geo.eval_field(geo.a_field(i), fpoint) for i in range(1, geo.m + 1)]
    X = geo.eval_field(geo.x_hat(), fpoint)
    AX = [geo.eval_field(geo.ai_xhat(i), fpoint) for i in range(1, geo.m + 1)]
    T02 = geo.eval_field(geo.frame["T(0,-2)"], fpoint)
    base = A + [X] + AX
    return _nrank(base + [T02], tol) == _nrank(base, tol) + 1


# --- symplectic structure on E-perp ------------------------------------------------

@dataclass(frozen=True)
class SkewComplementReport:
    nondegenerate: bool
    basis: tuple              # chart vectors spanning the skew complement of W
    lagrangian_v: bool
    u_complement_is_e: bool


def _eperp_fields(geo):
    return (
        [geo.a_field(i) for i in range(1, geo.m + 1)]
        + [geo.frame["T(0,-2)"], geo.frame["T(-1,0)"]]
        + [geo.frame[f"E{i}"] for i in range(1, geo.m + 1)]
    )


def skew_complement_W(spec, point, r, s, tol=RANK_TOL):
    """Skew complement of the generating line in E-perp for d(beta), beta the
    filtered frame r theta(-2,-2) + s theta(-1,-2)."""
    if s == 0:
        raise SpecFormatError("filtered frame requires s != 0")
    geo = geometry(spec)
    if abs(geo.c_value(point)) < tol:
        raise DegeneratePointError("C vanishes at the requested point")
    fpoint = {k: float(v) for k, v in point.items()}
    dbeta_mat = geo.dbeta_matrix(r, s)
    fields = _eperp_fields(geo)
    field_mat = np.column_stack([geo.eval_field(f, fpoint) for f in fields])
    gram = field_mat.T @ dbeta_mat @ field_mat
    size = len(fields)
    nondeg = np.linalg.matrix_rank(gram, tol=tol) == size
    # X coordinates in the E-perp basis are read off the normalized data
    xi = np.zeros(size)
    for p in range(1, geo.m + 1):
        xi[p - 1] = float(_eval_ring(geo.f_hat[p - 1], fpoint))
    xi[geo.m] = float(_eval_ring(geo.f0_hat, fpoint))
    xi[geo.m + 1] = 1.0
    functional = xi @ gram
    kernel = _nullspace_numeric(functional.reshape(1, -1), tol)
    basis_vectors = [tuple(field_mat @ coeffs) for coeffs in kernel.T]
    # V = span{A_i, T(0,-2)} spans the first m+1 slots of the E-perp basis
    vblock = gram[: geo.m + 1, : geo.m + 1]
    lagrangian = bool(np.max(np.abs(vblock)) < 1e-9 * (1 + np.max(np.abs(gram))))
    # skew complement of U: vectors pairing to zero with every A_i
    u_rows = gram[: geo.m, :]
    u_comp = _nullspace_numeric(u_rows, tol)
    e_coords = np.zeros((size, geo.m + 2))
    for p in range(geo.m):
        e_coords[p, p] = 1.0
    e_coords[geo.m, geo.m] = 1.0
    e_coords[:, geo.m + 1] = xi
    same = _same_span(u_comp, e_coords, tol)
    return SkewComplementReport(bool(nondeg), tuple(basis_vectors), lagrangian, bool(same))


def _eval_ring(r, point):
    if isinstance(r, Polynomial):
        return r.evaluate(point)
    return r.evaluate(point)


def _nullspace_numeric(mat, tol):
    _, sing, vt = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(sing > tol * max(mat.shape) * (sing[0] if len(sing) else 1.0)))
    return vt[rank:].T


def _same_span(a, b, tol):
    if a.shape[1] != b.shape[1]:
        return False
    ra = np.linalg.matrix_rank(a, tol=tol)
    rb = np.linalg.matrix_rank(b, tol=tol)
    rc = np.linalg.matrix_rank(np.hstack([a, b]), tol=tol)
    return ra == rb == rc


def partial_uw_vectors(spec, point):
    """Chart vectors spanning the bracket closure of U and the generating line."""
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    A = [geo.eval_field(geo.a_field(i), fpoint) for i in range(1, geo.m + 1)]
    X = geo.eval_field(geo.x_hat(), fpoint)
    AX = [geo.eval_field(geo.ai_xhat(i), fpoint) for i in range(1, geo.m + 1)]
    return A + [X] + AX


def spans_equal(vectors_a, vectors_b, tol=RANK_TOL):
    a = np.column_stack([np.asarray(v, dtype=float) for v in vectors_a])
    b = np.column_stack([np.asarray(v, dtype=float) for v in vectors_b])
    return _same_span(a, b, tol)


# --- secondary torsion -----------------------------------------------------------

def secondary_torsion(spec, point, tol=RANK_TOL, seed=42):
    """Secondary contact torsion components at a point.

    Defined only for specs whose contact torsion vanishes identically; the
    value is the coefficient on the vertical complement direction of
    [X, [X, A_i]] modulo span{A_j, X, [A_j, X]}.  Only its vanishing is
    invariant; the numeric vector is chart-normalized.
    """
    report = contact_torsion(spec, seed=seed)
    if report.is_zero != TorsionReport.PROVED_ZERO:
        raise TorsionPreconditionError(
            "secondary torsion is defined only when the contact torsion vanishes"
        )
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    if abs(geo.c_value(fpoint)) < tol:
        raise DegeneratePointError("C vanishes at the requested point")
    A = [geo.eval_field(geo.a_field(i), fpoint) for i in range(1, geo.m + 1)]
    X = geo.eval_field(geo.x_hat(), fpoint)
    AX = [geo.eval_field(geo.ai_xhat(i), fpoint) for i in range(1, geo.m + 1)]
    T02 = geo.eval_field(geo.frame["T(0,-2)"], fpoint)
    Tm1m2 = geo.eval_field(geo.frame["T(-1,-2)"], fpoint)
    Tm2m2 = geo.eval_field(geo.frame["T(-2,-2)"], fpoint)
    cols = A + [X] + AX + [T02, Tm1m2, Tm2m2]
    mat = np.column_stack(cols)
    if np.linalg.matrix_rank(mat, tol=tol) != 4 * geo.n - 4:
        raise DegeneratePointError("tangent basis lost rank at the point")
    out = []
    scale = max(1.0, float(np.max(np.abs(mat))))
    for i in range(1, geo.m + 1):
        b = geo.eval_field(geo.secondary_bracket(i), fpoint)
        coeffs = np.linalg.solve(mat, b)
        leak = max(abs(coeffs[-2]), abs(coeffs[-1]))
        if leak > 1e-6 * scale * max(1.0, float(np.max(np.abs(b)))):
            raise TorsionPreconditionError(
                f"secondary bracket leaks outside E-perp (component {leak:g})"
            )
        out.append(float(coeffs[-3]))
    return np.array(out)


def characteristic_system_test(spec, point, tol=1e-9, seed=42):
    """Whether the generating line is characteristic for the bracket closure.

    Implements the dual route: with mu = i(X) d theta(-1,-2), the test is
    whether i(X) d mu annihilates span{A_j, X, [A_j, X]} at the point.
    Returns (contained, max_pairing).
    """
    report = contact_torsion(spec, seed=seed)
    if report.is_zero != TorsionReport.PROVED_ZERO:
        raise TorsionPreconditionError(
            "characteristic test requires vanishing contact torsion"
        )
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    nu = geo.nu_form()
    nu_vals = np.array([float(v) for v in nu.evaluate(geo.chart, fpoint)])
    vectors = partial_uw_vectors(spec, point)
    worst = 0.0
    for v in vectors:
        worst = max(worst, abs(float(np.dot(nu_vals, np.asarray(v, dtype=float)))))
    scale = max(1.0, float(np.max(np.abs(nu_vals))))
    return worst <= tol * scale * 10, worst


# --- adapted graded frame ---------------------------------------------------------

@dataclass(frozen=True)
class AdaptedFrameReport:
    max_residual: float
    residuals: dict


_Z_DEGREE = {"t(-1,0)": -1, "t(0,-2)": -2, "t(-1,-2)": -3, "t(-2,-2)": -4}


def _u_frame(geo):
    """The adapted graded frame for a (pointwise) torsion-free spec."""
    fields = {"t(-1,0)": geo.x_hat()}
    f_low = geo.lower(geo.f_hat)
    for i in range(1, geo.m + 1):
        fields[f"a{i}"] = geo.a_field(i)
        fields[f"e{i}"] = geo.frame[f"E{i}"] - geo.frame["T(0,-2)"].scale(f_low[i - 1])
    fields["t(0,-2)"] = geo.frame["T(0,-2)"]
    fields["t(-1,-2)"] = geo.frame["T(-1,-2)"]
    fields["t(-2,-2)"] = geo.frame["T(-2,-2)"]
    return fields


def _adapted_frame_data(geo):
    """Per-spec cache: adapted frame, pairwise bracket fields, model constants."""
    if "adapted" in geo._cache:
        return geo._cache["adapted"]
    from .graded_sp import GradedLieAlgebra

    algebra = GradedLieAlgebra(geo.n, "P12", geo.omega)
    u_fields = _u_frame(geo)
    names = list(u_fields)
    z_of = {}
    for nm in names:
        if nm in _Z_DEGREE:
            z_of[nm] = _Z_DEGREE[nm]
        elif nm.startswith("a"):
            z_of[nm] = -1
        else:
            z_of[nm] = -2
    pairs = []
    for i, na in enumerate(names):
        for nb in names[i + 1:]:
            level = z_of[na] + z_of[nb]
            if level < -4:
                continue
            bracket_field = fm.lie_bracket(u_fields[na], u_fields[nb])
            constants = algebra.bracket_names(na, nb)
            pairs.append((na, nb, level, bracket_field, constants))
    geo._cache["adapted"] = (u_fields, pairs)
    return geo._cache["adapted"]


def adapted_frame_check(spec, point, tol=1e-9):
    """Compare brackets of the adapted frame against the model constants.

    Every pairwise bracket of the graded frame must equal the structure
    constant combination modulo the next filtration level; the maximum
    least-squares residual over all pairs is reported.
    """
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    report = contact_torsion(spec)
    tau_vals = [abs(float(_eval_ring(t, fpoint))) for t in report.tau_ring]
    if max(tau_vals, default=0.0) > 1e-9:
        raise TorsionPreconditionError(
            "adapted frame is defined only where the contact torsion vanishes"
        )
    u_fields, pairs = _adapted_frame_data(geo)
    names = list(u_fields)
    u_vals = {nm: geo.eval_field(f, fpoint) for nm, f in u_fields.items()}
    # filtration spans at the point, by level
    t_levels = {
        -1: [u_vals[nm] for nm in names if nm.startswith("a")] + [u_vals["t(-1,0)"]],
    }
    t_levels[-2] = t_levels[-1] + [u_vals["t(0,-2)"]] + [
        u_vals[nm] for nm in names if nm.startswith("e")
    ]
    t_levels[-3] = t_levels[-2] + [u_vals["t(-1,-2)"]]
    residuals = {}
    worst = 0.0
    for na, nb, level, bracket_field, constants in pairs:
        gvals = geo.eval_field(bracket_field, fpoint)
        for tgt, c in constants.items():
            gvals = gvals - float(c) * u_vals[tgt]
        span = np.column_stack(t_levels[max(level + 1, -3)])
        if np.linalg.norm(gvals) > 0:
            sol, *_ = np.linalg.lstsq(span, gvals, rcond=None)
            res = float(np.linalg.norm(span @ sol - gvals))
        else:
            res = 0.0
        residuals[(na, nb)] = res
        worst = max(worst, res)
    return AdaptedFrameReport(worst, residuals)


def torsion_obstruction_values(spec, point):
    """theta(-1,-2) pairing of [[A_i, X], X] at a point (no precondition).

    Nonzero values witness that no graded frame can match the model
    brackets at the point.
    """
    geo = geometry(spec)
    fpoint = {k: float(v) for k, v in point.items()}
    th = geo.coframe["theta(-1,-2)"]
    out = []
    for i in range(1, geo.m + 1):
        val = th.pair(geo.double_bracket(i))
        out.append(float(_eval_ring(val, fpoint)))
    return out


# --- random spec population --------------------------------------------------------

def random_polynomial_spec(n, rng_or_seed, degree=3, terms=3, torsion_free=False):
    """Random sparse polynomial spec (C = 1) for sweeps and acceptance runs."""
    rng = rng_or_seed if isinstance(rng_or_seed, Random) else Random(rng_or_seed)
    m = 2 * n - 4
    chart = fm.projective_chart(n)
    names = list(chart.names)

    def rand_poly_src():
        parts = []
        for _ in range(rng.randint(1, terms)):
            coef = Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3)))
            if coef == 0:
                coef = Fraction(1)
            deg = rng.randint(0, degree)
            factors = [str(coef) if coef.denominator == 1 else f"({coef.numerator}/{coef.denominator})"]
            for _ in range(deg):
                factors.append(rng.choice(names))
            parts.append("*".join(factors))
        return " + ".join(parts) if parts else "0"

    data = {
        "n": n,
        "f0": rand_poly_src(),
        "f": [rand_poly_src() for _ in range(m)],
    }
    spec = spec_from_dict(data)
    if torsion_free:
        spec = torsion_free_representative(spec)
    return spec
