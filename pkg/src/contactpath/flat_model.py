"""Symbolic realization of the flat model in exponential coordinates.

Vector fields and differential forms live in a single chart and have
polynomial components (degree <= 2 for everything the model needs), so all
identities here — frame/coframe duality, the bracket table, the structure
equation d Theta + Theta ^ Theta = 0, the isotropic-Grassmannian contact
forms — are checked by exact coefficient arithmetic.  No atlas, no manifold
machinery: everything happens in one chart.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedDimensionError
from .graded_sp import standard_omega
from .poly import Polynomial

PZERO = Polynomial()
PONE = Polynomial.constant(1)


def _pc(x):
    return Polynomial.coerce(x)


def _ring_mul(factor, value):
    """Multiply a component by a coefficient from either ring."""
    if isinstance(value, Polynomial) and isinstance(factor, (int, float, Fraction, Polynomial)):
        return _pc(factor) * value
    return factor * value


# --- chart ----------------------------------------------------------------

@dataclass(frozen=True)
class CoordChart:
    names: tuple

    @property
    def dim(self):
        return len(self.names)

    def index(self, name):
        return self.names.index(name)

    def origin(self):
        return {nm: Fraction(0) for nm in self.names}

    def point(self, values):
        values = list(values)
        if len(values) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(values)}")
        return dict(zip(self.names, values))


def projective_chart(n):
    """Coordinates on the projectivized contact bundle: t(=x^inf), x^alpha, z, u^alpha."""
    m = 2 * n - 4
    names = ["t", "x0"] + [f"x{i}" for i in range(1, m + 1)]
    names += ["z"] + ["u0"] + [f"u{i}" for i in range(1, m + 1)]
    return CoordChart(tuple(names))


def grassmann_chart(n, k):
    """Coordinates x{alpha}_{i}, y{alpha}{beta} (alpha <= beta) on the k-plane space."""
    w = 2 * (n - k)
    names = [f"x{a}_{i}" for a in range(1, k + 1) for i in range(1, w + 1)]
    names += [f"y{a}{b}" for a in range(1, k + 1) for b in range(a, k + 1)]
    return CoordChart(tuple(names))


# --- fields and forms -------------------------------------------------------

class VectorField:
    """Derivation with one component per coordinate; components are ring elements."""

    __slots__ = ("components",)

    def __init__(self, components=None):
        self.components = {k: v for k, v in (components or {}).items() if not _is_zero(v)}

    def __add__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = v if k not in out else out[k] + v
        return VectorField(out)

    def __sub__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = -v if k not in out else out[k] - v
        return VectorField(out)

    def __neg__(self):
        return VectorField({k: -v for k, v in self.components.items()})

    def scale(self, factor):
        return VectorField({k: _ring_mul(factor, v) for k, v in self.components.items()})

    def apply(self, func):
        """Directional derivative of a ring element."""
        total = None
        for coord, comp in self.components.items():
            term = comp * func.diff(coord)
            total = term if total is None else total + term
        return PZERO if total is None else total

    def evaluate(self, chart, point):
        return [
            _num(self.components.get(nm, PZERO), point) for nm in chart.names
        ]

    def __repr__(self):
        body = ", ".join(f"d/d{k}: {v}" for k, v in sorted(self.components.items()))
        return f"VectorField({body})"


def _is_zero(x):
    if isinstance(x, Polynomial):
        return x.is_zero()
    return x == 0


def _num(x, point):
    if isinstance(x, (int, Fraction, float)):
        return x
    return x.evaluate(point)


def lie_bracket(x, y):
    """Coordinate Lie bracket [X, Y]; exact on polynomial components."""
    out = {}
    for coord, comp in y.components.items():
        term = x.apply(comp)
        out[coord] = term if coord not in out else out[coord] + term
    for coord, comp in x.components.items():
        term = y.apply(comp)
        out[coord] = -term if coord not in out else out[coord] - term
    return VectorField(out)


class OneForm:
    __slots__ = ("components",)

    def __init__(self, components=None):
        self.components = {k: v for k, v in (components or {}).items() if not _is_zero(v)}

    def __add__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = v if k not in out else out[k] + v
        return OneForm(out)

    def __sub__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = -v if k not in out else out[k] - v
        return OneForm(out)

    def __neg__(self):
        return OneForm({k: -v for k, v in self.components.items()})

    def scale(self, factor):
        return OneForm({k: _ring_mul(factor, v) for k, v in self.components.items()})

    def pair(self, field):
        total = None
        for coord, comp in self.components.items():
            fc = field.components.get(coord)
            if fc is not None:
                term = comp * fc
                total = term if total is None else total + term
        return PZERO if total is None else total

    def d(self):
        """Exterior derivative."""
        out = {}
        for coord, comp in self.components.items():
            for var in _vars_of(comp):
                if var == coord:
                    continue
                key, sign = ((var, coord), 1) if var < coord else ((coord, var), -1)
                term = comp.diff(var)
                if sign < 0:
                    term = -term
                out[key] = term if key not in out else out[key] + term
        return TwoForm(out)

    def evaluate(self, chart, point):
        return [_num(self.components.get(nm, PZERO), point) for nm in chart.names]

    def __repr__(self):
        body = " + ".join(f"({v}) d{k}" for k, v in sorted(self.components.items()))
        return f"OneForm({body or 0})"


class TwoForm:
    """Keys are coordinate pairs (a, b) with a < b lexicographically."""

    __slots__ = ("components",)

    def __init__(self, components=None):
        self.components = {k: v for k, v in (components or {}).items() if not _is_zero(v)}

    def __add__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = v if k not in out else out[k] + v
        return TwoForm(out)

    def __sub__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = -v if k not in out else out[k] - v
        return TwoForm(out)

    def scale(self, factor):
        return TwoForm({k: _ring_mul(factor, v) for k, v in self.components.items()})

    def is_zero(self):
        return not self.components

    def pair(self, x, y):
        total = None
        for (a, b), comp in self.components.items():
            xa = x.components.get(a)
            xb = x.components.get(b)
            ya = y.components.get(a)
            yb = y.components.get(b)
            if xa is not None and yb is not None:
                term = comp * xa * yb
                total = term if total is None else total + term
            if xb is not None and ya is not None:
                term = comp * xb * ya
                total = -term if total is None else total - term
        return PZERO if total is None else total

    def interior(self, field):
        """Interior product i(X) of a vector field."""
        out = {}
        for (a, b), comp in self.components.items():
            xa = field.components.get(a)
            xb = field.components.get(b)
            if xa is not None:
                term = comp * xa
                out[b] = term if b not in out else out[b] + term
            if xb is not None:
                term = comp * xb
                out[a] = -term if a not in out else out[a] - term
        return OneForm(out)

    def gram(self, chart, fields, point):
        """Matrix of pairings of the form on a list of fields at a point."""
        vals = [f.evaluate(chart, point) for f in fields]
        idx = {nm: i for i, nm in enumerate(chart.names)}
        size = len(fields)
        out = [[0] * size for _ in range(size)]
        for (a, b), comp in self.components.items():
            cval = _num(comp, point)
            ia, ib = idx[a], idx[b]
            for r in range(size):
                for c in range(size):
                    out[r][c] += cval * (vals[r][ia] * vals[c][ib] - vals[r][ib] * vals[c][ia])
        return out

    def __repr__(self):
        body = " + ".join(f"({v}) d{a}^d{b}" for (a, b), v in sorted(self.components.items()))
        return f"TwoForm({body or 0})"


def _vars_of(comp):
    if isinstance(comp, Polynomial):
        return comp.variables()
    return comp_variables(comp)


def comp_variables(expr_like):
    # duck-typed fallback for expression-tree components
    seen = set()

    def walk(e):
        for slot in getattr(e, "__slots__", ()):
            v = getattr(e, slot)
            if isinstance(v, str) and slot == "name":
                seen.add(v)
            elif hasattr(v, "__slots__"):
                walk(v)

    walk(expr_like)
    return seen


def wedge(a, b):
    """Wedge of two one-forms."""
    out = {}
    for ca, va in a.components.items():
        for cb, vb in b.components.items():
            if ca == cb:
                continue
            key, sign = ((ca, cb), 1) if ca < cb else ((cb, ca), -1)
            term = va * vb
            if sign < 0:
                term = -term
            out[key] = term if key not in out else out[key] + term
    return TwoForm(out)


def eval_wedge_of_two_forms(gram_matrices, size):
    """Evaluate Omega_1 ^ ... ^ Omega_m on vectors v_1..v_{2m}.

    Each gram matrix holds Omega_k(v_i, v_j); the result sums over ordered
    partitions of the vector indices into one pair per form, with sign.
    """
    m = len(gram_matrices)
    assert size == 2 * m
    total = 0

    def rec(remaining, k, sign_acc, prod):
        nonlocal total
        if k == m:
            total += sign_acc * prod
            return
        first = remaining[0]
        rest = remaining[1:]
        for pos, second in enumerate(rest):
            others = rest[:pos] + rest[pos + 1:]
            # sign of moving (first, second) to the front of `remaining`
            sign = (-1) ** pos
            val = gram_matrices[k][first][second]
            if val:
                rec(others, k + 1, sign_acc * sign, prod * val)

    rec(tuple(range(size)), 0, 1, 1)
    return total


# --- the projectivized-contact-bundle frame --------------------------------

def _omega(n, omega=None):
    m = 2 * n - 4
    return [list(map(Fraction, row)) for row in (standard_omega(m) if omega is None else omega)]


def frame(n, omega=None):
    """Left-invariant frame on the projectivized contact bundle.

    Keys: 'T(-1,0)', 'A1'.., 'E1'.., 'T(0,-2)', 'T(-1,-2)', 'T(-2,-2)'.
    """
    if n < 3:
        raise UnsupportedDimensionError("frame requires n >= 3")
    om = _omega(n, omega)
    m = 2 * n - 4
    u = [Polynomial.variable(f"u{i}") for i in range(1, m + 1)]
    u0 = Polynomial.variable("u0")
    x = [Polynomial.variable(f"x{i}") for i in range(1, m + 1)]
    x0 = Polynomial.variable("x0")
    t = Polynomial.variable("t")

    def X_inf():
        return VectorField({"t": PONE, "z": x0})

    def X_0():
        return VectorField({"x0": PONE, "z": -t})

    def X_i(i):
        dz = PZERO
        for q in range(1, m + 1):
            dz = dz + om[i - 1][q - 1] * x[q - 1]
        return VectorField({f"x{i}": PONE, "z": dz})

    fields = {}
    for i in range(1, m + 1):
        du0 = PZERO
        for p in range(1, m + 1):
            du0 = du0 + om[i - 1][p - 1] * u[p - 1]
        fields[f"A{i}"] = VectorField({f"u{i}": PONE, "u0": du0})
    tm10 = X_inf() + X_0().scale(u0)
    for p in range(1, m + 1):
        tm10 = tm10 + X_i(p).scale(u[p - 1])
    fields["T(-1,0)"] = tm10
    for i in range(1, m + 1):
        coeff = PZERO
        for p in range(1, m + 1):
            coeff = coeff + om[i - 1][p - 1] * u[p - 1]
        fields[f"E{i}"] = X_i(i) + X_0().scale(coeff)
    fields["T(0,-2)"] = VectorField({"u0": PONE})
    fields["T(-1,-2)"] = X_0()
    fields["T(-2,-2)"] = VectorField({"z": PONE})
    return fields


def coframe(n, omega=None):
    """Dual left-invariant coframe; keys mirror frame() plus theta/eta indices.

    'theta(-1,0)', 'theta1'.., 'eta1'.., 'theta(0,-2)', 'theta(-1,-2)',
    'theta(-2,-2)'.
    """
    if n < 3:
        raise UnsupportedDimensionError("coframe requires n >= 3")
    om = _omega(n, omega)
    m = 2 * n - 4
    u = [Polynomial.variable(f"u{i}") for i in range(1, m + 1)]
    u0 = Polynomial.variable("u0")
    x = [Polynomial.variable(f"x{i}") for i in range(1, m + 1)]
    x0 = Polynomial.variable("x0")
    t = Polynomial.variable("t")

    forms = {"theta(-1,0)": OneForm({"t": PONE})}
    for i in range(1, m + 1):
        forms[f"theta{i}"] = OneForm({f"u{i}": PONE})
        forms[f"eta{i}"] = OneForm({f"x{i}": PONE, "t": -u[i - 1]})
    comps = {"x0": PONE, "t": -u0}
    for q in range(1, m + 1):
        acc = PZERO
        for p in range(1, m + 1):
            acc = acc + om[p - 1][q - 1] * u[p - 1]
        comps[f"x{q}"] = comps.get(f"x{q}", PZERO) + acc
    forms["theta(-1,-2)"] = OneForm(comps)
    comps = {"z": PONE, "x0": t, "t": -x0}
    for q in range(1, m + 1):
        acc = PZERO
        for p in range(1, m + 1):
            acc = acc + om[p - 1][q - 1] * x[p - 1]
        comps[f"x{q}"] = comps.get(f"x{q}", PZERO) + acc
    forms["theta(-2,-2)"] = OneForm(comps)
    comps = {"u0": PONE}
    for q in range(1, m + 1):
        acc = PZERO
        for p in range(1, m + 1):
            acc = acc + om[p - 1][q - 1] * u[p - 1]
        comps[f"u{q}"] = acc
    forms["theta(0,-2)"] = OneForm(comps)
    return forms


def frame_coframe_pairs(n):
    """Matching (frame key, coframe key) order for duality checks."""
    m = 2 * n - 4
    pairs = [("T(-1,0)", "theta(-1,0)")]
    pairs += [(f"A{i}", f"theta{i}") for i in range(1, m + 1)]
    pairs += [(f"E{i}", f"eta{i}") for i in range(1, m + 1)]
    pairs += [
        ("T(0,-2)", "theta(0,-2)"),
        ("T(-1,-2)", "theta(-1,-2)"),
        ("T(-2,-2)", "theta(-2,-2)"),
    ]
    return pairs


def pdq_frame(n, omega=None):
    """Alternative frame from the (p, q) contactomorphism chart.

    Same keys as frame(); satisfies the same bracket relations.  Chart
    coordinates: q, p, x1.., z, u0, u1...
    """
    if n < 3:
        raise UnsupportedDimensionError("pdq_frame requires n >= 3")
    om = _omega(n, omega)
    m = 2 * n - 4
    u = [Polynomial.variable(f"u{i}") for i in range(1, m + 1)]
    u0 = Polynomial.variable("u0")
    x = [Polynomial.variable(f"x{i}") for i in range(1, m + 1)]
    p = Polynomial.variable("p")

    # The 1/2 in the horizontal lift matches T(-2,-2) = (1/2) d/dz in this
    # chart; it is forced by [E_i, E_j] = -2 omega_ij T(-2,-2).
    def X_i(i):
        dz = PZERO
        for q_ in range(1, m + 1):
            dz = dz + Fraction(1, 2) * om[i - 1][q_ - 1] * x[q_ - 1]
        return VectorField({f"x{i}": PONE, "z": dz})

    fields = {}
    for i in range(1, m + 1):
        du0 = PZERO
        for q_ in range(1, m + 1):
            du0 = du0 + om[i - 1][q_ - 1] * u[q_ - 1]
        fields[f"A{i}"] = VectorField({f"u{i}": PONE, "u0": du0})
    fields["T(0,-2)"] = VectorField({"u0": PONE})
    for i in range(1, m + 1):
        coeff = PZERO
        for q_ in range(1, m + 1):
            coeff = coeff + om[i - 1][q_ - 1] * u[q_ - 1]
        fields[f"E{i}"] = X_i(i) + VectorField({"p": coeff})
    fields["T(-1,-2)"] = VectorField({"p": PONE})
    fields["T(-2,-2)"] = VectorField({"z": Polynomial.constant(Fraction(1, 2))})
    tm = VectorField({"q": PONE, "z": p, "p": u0})
    for q_ in range(1, m + 1):
        tm = tm + X_i(q_).scale(u[q_ - 1])
    fields["T(-1,0)"] = tm
    return fields


def pdq_chart(n):
    m = 2 * n - 4
    names = ["q", "p"] + [f"x{i}" for i in range(1, m + 1)] + ["z", "u0"]
    names += [f"u{i}" for i in range(1, m + 1)]
    return CoordChart(tuple(names))


# --- structure equation -----------------------------------------------------

def theta_matrix(n, omega=None):
    """The flat-model connection form: a (2n) x (2n) matrix of one-forms."""
    cf = coframe(n, omega)
    om = _omega(n, omega)
    m = 2 * n - 4
    d = 2 * n
    zero = OneForm()
    theta = [[zero for _ in range(d)] for _ in range(d)]
    theta[1][0] = cf["theta(-1,0)"]
    for i in range(1, m + 1):
        theta[1 + i][0] = cf[f"eta{i}"]
        theta[1 + i][1] = cf[f"theta{i}"]
    theta[d - 2][0] = cf["theta(-1,-2)"]
    theta[d - 2][1] = cf["theta(0,-2)"]
    theta[d - 1][0] = cf["theta(-2,-2)"]
    theta[d - 1][1] = cf["theta(-1,-2)"]
    for j in range(1, m + 1):
        lowered_theta = OneForm()
        lowered_eta = OneForm()
        for q in range(1, m + 1):
            if om[q - 1][j - 1]:
                lowered_theta = lowered_theta + cf[f"theta{q}"].scale(om[q - 1][j - 1])
                lowered_eta = lowered_eta + cf[f"eta{q}"].scale(om[q - 1][j - 1])
        theta[d - 2][1 + j] = -lowered_theta
        theta[d - 1][1 + j] = -lowered_eta
    theta[d - 1][d - 2] = -cf["theta(-1,0)"]
    return theta


def structure_equation_residual(theta):
    """d Theta + Theta ^ Theta, entrywise, as two-forms."""
    d = len(theta)
    out = []
    for i in range(d):
        row = []
        for k in range(d):
            acc = theta[i][k].d()
            for j in range(d):
                if theta[i][j].components and theta[j][k].components:
                    acc = acc + wedge(theta[i][j], theta[j][k])
            row.append(acc)
        out.append(row)
    return out


def maurer_cartan_residual(n, omega=None):
    """Residual of the structure equation for the flat-model form."""
    return structure_equation_residual(theta_matrix(n, omega))


def residual_is_zero(res):
    return all(entry.is_zero() for row in res for entry in row)


# --- isotropic Grassmannian charts ------------------------------------------

@dataclass
class QkForms:
    n: int
    k: int
    chart: CoordChart
    theta: dict      # (alpha, beta) alpha <= beta -> OneForm
    omega_forms: dict  # (alpha, beta) -> TwoForm
    fields: dict     # (i, alpha) -> VectorField
    vertical: dict   # (alpha, beta) alpha <= beta -> VectorField


def qk_forms(n, k, omega=None):
    """Contact forms, spanning fields and vertical fields on the k-plane chart."""
    if not 1 <= k <= n - 1:
        raise UnsupportedDimensionError(f"k must satisfy 1 <= k <= n-1, got {k}")
    w = 2 * (n - k)
    om = [list(map(Fraction, row)) for row in (standard_omega(w) if omega is None else omega)]
    chart = grassmann_chart(n, k)
    xs = {(a, i): Polynomial.variable(f"x{a}_{i}") for a in range(1, k + 1) for i in range(1, w + 1)}

    def ykey(a, b):
        return f"y{min(a, b)}{max(a, b)}"

    theta = {}
    for a in range(1, k + 1):
        for b in range(a, k + 1):
            comps = {ykey(a, b): PONE}
            for q in range(1, w + 1):
                acc = PZERO
                for p in range(1, w + 1):
                    acc = acc + Fraction(1, 2) * om[p - 1][q - 1] * xs[(a, p)]
                comps[f"x{b}_{q}"] = comps.get(f"x{b}_{q}", PZERO) + acc
            for q in range(1, w + 1):
                acc = PZERO
                for p in range(1, w + 1):
                    acc = acc + Fraction(1, 2) * om[p - 1][q - 1] * xs[(b, p)]
                comps[f"x{a}_{q}"] = comps.get(f"x{a}_{q}", PZERO) + acc
            theta[(a, b)] = OneForm(comps)

    omega_forms = {key: form.d() for key, form in theta.items()}

    fields = {}
    for a in range(1, k + 1):
        for i in range(1, w + 1):
            comps = {f"x{a}_{i}": PONE}
            for s in range(1, k + 1):
                acc = PZERO
                for p in range(1, w + 1):
                    acc = acc + om[i - 1][p - 1] * xs[(s, p)]
                # symmetric-coordinate convention: off-diagonal pairs carry 1/2
                factor = PONE if s == a else Polynomial.constant(Fraction(1, 2))
                comps[ykey(s, a)] = comps.get(ykey(s, a), PZERO) + factor * acc
            fields[(i, a)] = VectorField(comps)

    vertical = {}
    for a in range(1, k + 1):
        for b in range(a, k + 1):
            val = PONE if a == b else Polynomial.constant(Fraction(1, 2))
            vertical[(a, b)] = VectorField({ykey(a, b): val})

    return QkForms(n, k, chart, theta, omega_forms, fields, vertical)


def qk_psi_power_nonzero(n, k, point=None):
    """Whether Psi^{n-k} restricted to the multicontact bundle is nonzero.

    Psi is the eta-determinant of the matrix of two-forms; the power is
    evaluated on the full spanning set of fields at the chart point.
    """
    qk = qk_forms(n, k)
    point = point or qk.chart.origin()
    fields = [qk.fields[(i, a)] for a in range(1, k + 1) for i in range(1, 2 * (n - k) + 1)]
    grams = {}
    for key, form in qk.omega_forms.items():
        grams[key] = form.gram(qk.chart, fields, point)
        grams[(key[1], key[0])] = grams[key]
    size = len(fields)
    perms = list(itertools.permutations(range(1, k + 1)))

    def sgn(perm):
        s = 1
        p = list(perm)
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s

    # Psi as a sum of wedge products of k two-forms, then expand the power
    psi_terms = []
    for alphas in perms:
        for betas in perms:
            coeff = sgn(alphas) * sgn(betas)
            psi_terms.append((coeff, [grams[(alphas[r], betas[r])] for r in range(k)]))
    total = 0
    for combo in itertools.product(psi_terms, repeat=n - k):
        coeff = 1
        stack = []
        for c, factors in combo:
            coeff *= c
            stack.extend(factors)
        total += coeff * eval_wedge_of_two_forms(stack, size)
    return total != 0


# --- Q2 endomorphisms --------------------------------------------------------

def efj_identity_check(n):
    """Exact residuals for the endomorphism identities on the k = 2 chart.

    Returns a dict of named residual magnitudes (max abs over entries); all
    must be exactly zero.
    """
    if n < 3:
        raise UnsupportedDimensionError("k = 2 chart requires n >= 3")
    k = 2
    w = 2 * (n - k)
    om = [list(map(Fraction, row)) for row in standard_omega(w)]
    qk = qk_forms(n, k)
    idx = [(i, a) for a in (1, 2) for i in range(1, w + 1)]
    pos = {ia: r for r, ia in enumerate(idx)}
    size = len(idx)

    eta_upper = {(1, 2): Fraction(1), (2, 1): Fraction(-1), (1, 1): Fraction(0), (2, 2): Fraction(0)}
    g = [[eta_upper[(a, b)] * om[i - 1][j - 1] for (j, b) in idx] for (i, a) in idx]

    def endo(matrix_action):
        out = [[Fraction(0)] * size for _ in range(size)]
        for (i, a), r in pos.items():
            for (target, coeff) in matrix_action(i, a):
                out[pos[target]][r] += coeff
        return out

    Emap = endo(lambda i, a: [((i, 3 - a), Fraction(1))])
    Fmap = endo(lambda i, a: [((i, a), Fraction(1) if a == 1 else Fraction(-1))])
    Jmap = endo(lambda i, a: [((i, 3 - a), Fraction(1) if a == 1 else Fraction(-1))])

    def matmulq(A, B):
        return [
            [sum(A[r][k_] * B[k_][c] for k_ in range(size)) for c in range(size)]
            for r in range(size)
        ]

    def residual(M):
        return max((abs(x) for row in M for x in row), default=Fraction(0))

    def minus_identity(M):
        return [
            [M[r][c] - (1 if r == c else 0) for c in range(size)] for r in range(size)
        ]

    def g_twisted(A):
        # g(A . , . ): entry (r, c) = g(A v_r, v_c)
        return [
            [sum(A[s][r] * g[s][c] for s in range(size)) for c in range(size)]
            for r in range(size)
        ]

    point = qk.chart.origin()
    fields = [qk.fields[ia] for ia in idx]
    omega_grams = {
        key: form.gram(qk.chart, fields, point) for key, form in qk.omega_forms.items()
    }

    def matsubq(A, B):
        return [[A[r][c] - B[r][c] for c in range(size)] for r in range(size)]

    gE = g_twisted(Emap)
    gF = g_twisted(Fmap)
    gJ = g_twisted(Jmap)
    out = {
        "E^2 - I": residual(minus_identity(matmulq(Emap, Emap))),
        "F^2 - I": residual(minus_identity(matmulq(Fmap, Fmap))),
        "J^2 + I": residual([[x + (1 if r == c else 0) for c, x in enumerate(row)] for r, row in enumerate(matmulq(Jmap, Jmap))]),
        "EF - J": residual(matsubq(matmulq(Emap, Fmap), Jmap)),
        "g(E.,E.) + g": residual([[sum(Emap[s][r] * sum(Emap[t][c] * g[s][t] for t in range(size)) for s in range(size)) + g[r][c] for c in range(size)] for r in range(size)]),
        "g(F.,F.) + g": residual([[sum(Fmap[s][r] * sum(Fmap[t][c] * g[s][t] for t in range(size)) for s in range(size)) + g[r][c] for c in range(size)] for r in range(size)]),
        "g(J.,J.) - g": residual([[sum(Jmap[s][r] * sum(Jmap[t][c] * g[s][t] for t in range(size)) for s in range(size)) - g[r][c] for c in range(size)] for r in range(size)]),
        "Omega12 - g(F.,.)": residual(matsubq(omega_grams[(1, 2)], gF)),
        "Omega11 + g(E.,.) + g(J.,.)": residual([[omega_grams[(1, 1)][r][c] + gE[r][c] + gJ[r][c] for c in range(size)] for r in range(size)]),
        "Omega22 - g(E.,.) + g(J.,.)": residual([[omega_grams[(2, 2)][r][c] - gE[r][c] + gJ[r][c] for c in range(size)] for r in range(size)]),
    }
    return out


# --- dimension formulas -------------------------------------------------------

@dataclass(frozen=True)
class DimensionReport:
    n: int
    k: int
    dim_qk: int
    rank_c: int
    corank: int


def dims(n, k):
    """Closed-form dimensions of the isotropic Grassmannian and its contact bundle."""
    if not 1 <= k <= n:
        raise UnsupportedDimensionError(f"k must satisfy 1 <= k <= n, got {k}")
    corank = k * (k + 1) // 2
    rank_c = 2 * k * (n - k)
    return DimensionReport(n, k, corank + rank_c, rank_c, corank)


def orbit_dim(n, k, s):
    """Dimension of the rank stratum labeled by radical dimension s."""
    if s < 0 or s > k or (k - s) % 2 != 0:
        raise UnsupportedDimensionError(
            f"s must lie in {{k, k-2, ...}} and be >= 0; got s={s} for k={k}"
        )
    return s * (s + 1) // 2 + 2 * s * (n - s) + (k - s) * (2 * n - k - s)
