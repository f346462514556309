"""Exact matrix realization of sp(n, R) with its Z^2-grading.

The symplectic vector space carries the ordered basis

    f_inf, e_inf, e_1, ..., e_{2n-4}, e_0, f_0

with Omega(f_inf, f_0) = 1 = Omega(e_inf, e_0) and Omega(e_i, e_j) =
omega_{ij}.  The two scaling elements are the diagonal matrices

    E1 = diag(1, 0, ..., 0, -1)        (in the f_inf / f_0 slots)
    E2 = diag(1, 1, 0, ..., 0, -1, -1) (f_inf, e_inf / e_0, f_0 slots)

and the bidegree of a basis element is its pair of ad-eigenvalues.  Lowercase
Latin indices are raised and lowered with omega_{ij} via x_i = x^p omega_{pi}
and omega^{ip} omega_{pj} = -delta^i_j; every torsion formula downstream
relies on exactly these conventions.

All arithmetic in this module is exact; there is no tolerance anywhere.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistencyError, InvalidParabolicError, UnsupportedDimensionError
from . import exactlinalg as ela

P1, P2, P12 = "P1", "P2", "P12"
_PARABOLICS = (P1, P2, P12)


def standard_omega(m):
    """Standard block form [[0, I], [-I, 0]] on m = 2k middle indices."""
    if m % 2:
        raise ValueError("middle dimension must be even")
    k = m // 2
    w = ela.zeros(m, m)
    for i in range(k):
        w[i][k + i] = Fraction(1)
        w[k + i][i] = Fraction(-1)
    return w


@dataclass(frozen=True)
class BasisElement:
    name: str
    matrix: tuple  # tuple of row tuples, Fractions
    bidegree: tuple  # (i1, i2) eigenvalues of ad(E1), ad(E2)
    entries: tuple = None  # sparse (row, col, value) view, filled on init

    def __post_init__(self):
        object.__setattr__(
            self,
            "entries",
            tuple(
                (r, c, v)
                for r, row in enumerate(self.matrix)
                for c, v in enumerate(row)
                if v
            ),
        )


@dataclass(frozen=True)
class G0Element:
    """(C, c, d) in Sp(n-2) x GL(1) x GL(1), acting by the adjoint action."""

    C: tuple
    c: Fraction
    d: Fraction


def _freeze(m):
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def _sparse(m):
    return [(r, c, v) for r, row in enumerate(m) for c, v in enumerate(row) if v]


def _sparse_mul(a_entries, b_by_row):
    out = {}
    for r, k, va in a_entries:
        for c, vb in b_by_row.get(k, ()):
            key = (r, c)
            s = out.get(key, 0) + va * vb
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


class GradedLieAlgebra:
    """Basis of sp(n, R), each element tagged with its Z^2-bidegree."""

    def __init__(self, n, parabolic=P12, omega=None):
        if parabolic not in _PARABOLICS:
            raise InvalidParabolicError(f"parabolic must be one of {_PARABOLICS}")
        if parabolic == P12 and n < 3:
            raise UnsupportedDimensionError(
                "P12 grading requires n >= 3 (the three-dimensional theory is excluded)"
            )
        if n < 2:
            raise UnsupportedDimensionError(f"n must be >= 2, got {n}")
        self.n = n
        self.parabolic = parabolic
        m = 2 * n - 4
        self.m = m
        self.omega = _freeze(standard_omega(m) if omega is None else omega)
        self._check_omega()
        # omega^{ij} with omega^{ip} omega_{pj} = -delta^i_j
        self.omega_upper = _freeze(ela.scalarmul(-1, ela.inverse([list(r) for r in self.omega])))
        self.symplectic_form = _freeze(self._big_omega())
        self.basis = self._build_basis()
        self.index = {b.name: i for i, b in enumerate(self.basis)}
        self._by_row = {}
        for i, b in enumerate(self.basis):
            rows = {}
            for r, c, v in b.entries:
                rows.setdefault(r, []).append((c, v))
            self._by_row[i] = rows
        self._gram_solvers = self._build_gram_solvers()

    # --- construction ------------------------------------------------------
    def _check_omega(self):
        m = self.m
        for i in range(m):
            for j in range(m):
                if self.omega[i][j] != -self.omega[j][i]:
                    raise ValueError("omega must be skew-symmetric")
        if m and ela.rank([list(r) for r in self.omega]) != m:
            raise ValueError("omega must be nondegenerate")

    def _big_omega(self):
        n, m = self.n, self.m
        d = 2 * n
        big = ela.zeros(d, d)
        big[0][d - 1] = Fraction(1)
        big[d - 1][0] = Fraction(-1)
        big[1][d - 2] = Fraction(1)
        big[d - 2][1] = Fraction(-1)
        for i in range(m):
            for j in range(m):
                big[2 + i][2 + j] = self.omega[i][j]
        return big

    def _build_basis(self):
        n, m = self.n, self.m
        d = 2 * n
        om = self.omega
        basis = []

        def mat():
            return ela.zeros(d, d)

        def add(name, mtx, bideg):
            basis.append(BasisElement(name, _freeze(mtx), bideg))

        # negative part, matrices read off the general element of g_-
        t = mat()
        t[1][0] = Fraction(1)
        t[d - 1][d - 2] = Fraction(-1)
        add("t(-1,0)", t, (-1, 0))
        for p in range(1, m + 1):
            a = mat()
            a[1 + p][1] = Fraction(1)
            for q in range(1, m + 1):
                a[d - 2][1 + q] = -om[p - 1][q - 1]
            add(f"a{p}", a, (0, -1))
        t = mat()
        t[d - 2][1] = Fraction(1)
        add("t(0,-2)", t, (0, -2))
        for p in range(1, m + 1):
            e = mat()
            e[1 + p][0] = Fraction(1)
            for q in range(1, m + 1):
                e[d - 1][1 + q] = -om[p - 1][q - 1]
            add(f"e{p}", e, (-1, -1))
        t = mat()
        t[d - 2][0] = Fraction(1)
        t[d - 1][1] = Fraction(1)
        add("t(-1,-2)", t, (-1, -2))
        t = mat()
        t[d - 1][0] = Fraction(1)
        add("t(-2,-2)", t, (-2, -2))

        # positive part: sp(n) is transpose-closed and transposition negates
        # the bidegree, so transposes of the negative basis span p^+
        for b in list(basis):
            if b.name.startswith("t("):
                pos = "t(" + ",".join(str(-int(x)) for x in b.name[2:-1].split(",")) + ")"
            else:
                pos = b.name[0] + "*" + b.name[1:]
            mtx = ela.transpose([list(row) for row in b.matrix])
            add(pos, mtx, (-b.bidegree[0], -b.bidegree[1]))

        # g_{0,0}: two grading directions plus the middle sp(m) block
        h = mat()
        h[0][0] = Fraction(1)
        h[d - 1][d - 1] = Fraction(-1)
        add("h_c", h, (0, 0))
        h = mat()
        h[1][1] = Fraction(1)
        h[d - 2][d - 2] = Fraction(-1)
        add("h_d", h, (0, 0))
        for i, middle in enumerate(self._middle_sp_basis()):
            full = mat()
            for r in range(m):
                for c in range(m):
                    full[2 + r][2 + c] = middle[r][c]
            add(f"s{i + 1}", full, (0, 0))
        return basis

    def _middle_sp_basis(self):
        """Basis of sp(omega) on the middle block.

        X is in sp(omega) iff omega X is symmetric, so omega^{-1} applied to
        the standard symmetric basis spans it exactly.
        """
        m = self.m
        if m == 0:
            return []
        om_inv = ela.inverse([list(r) for r in self.omega])
        basis = []
        for i in range(m):
            for j in range(i, m):
                sym = ela.zeros(m, m)
                sym[i][j] += Fraction(1)
                sym[j][i] += Fraction(1)
                basis.append(ela.matmul(om_inv, sym))
        return basis

    def _build_gram_solvers(self):
        """Per-bidegree-pair inverted Gram blocks of the trace form.

        tr(XY) pairs g_I with g_{-I} only, so coefficient extraction reduces
        to small block solves; this keeps expansion exact and fast.
        """
        groups = {}
        for i, b in enumerate(self.basis):
            groups.setdefault(b.bidegree, []).append(i)
        solvers = {}
        for bideg, idxs in groups.items():
            dual = (-bideg[0], -bideg[1])
            dual_idxs = groups.get(dual)
            if dual_idxs is None:
                raise InconsistencyError(f"no dual component for bidegree {bideg}")
            # rows indexed by the dual component so that c = gram^{-1} rhs
            gram = [
                [self._trace_pair(j, i) for i in idxs] for j in dual_idxs
            ]
            solvers[bideg] = (idxs, dual_idxs, ela.inverse(gram))
        return solvers

    def _trace_pair(self, i, j):
        total = Fraction(0)
        rows_j = self._by_row[j]
        for r, c, v in self.basis[i].entries:
            for c2, v2 in rows_j.get(c, ()):
                if c2 == r:
                    total += v * v2
        return total

    # --- basic queries -------------------------------------------------------
    @property
    def dimension(self):
        return len(self.basis)

    def bidegrees(self):
        return sorted({b.bidegree for b in self.basis})

    def component(self, bidegree):
        return [b for b in self.basis if b.bidegree == bidegree]

    def z_degree(self, bidegree):
        """Degree of a bidegree in the grading induced by this parabolic."""
        if self.parabolic == P1:
            return bidegree[0]
        if self.parabolic == P2:
            return bidegree[1]
        return bidegree[0] + bidegree[1]

    def grading(self):
        """Map degree -> list of basis elements, per the chosen parabolic."""
        out = {}
        for b in self.basis:
            out.setdefault(self.z_degree(b.bidegree), []).append(b)
        return dict(sorted(out.items()))

    def element_matrix(self, coeffs):
        """Dense matrix of sum_i coeffs[name] * basis[name]."""
        d = 2 * self.n
        m = ela.zeros(d, d)
        for name, c in coeffs.items():
            if not c:
                continue
            for r, col, v in self.basis[self.index[name]].entries:
                m[r][col] += Fraction(c) * v
        return m

    # --- expansion and brackets ----------------------------------------------
    def expand(self, matrix):
        """Expand a matrix in the stored basis; exact, raises if not in span."""
        coeffs = {}
        for bideg, (idxs, dual_idxs, inv_gram) in self._gram_solvers.items():
            rhs = [self._trace_matrix(matrix, j) for j in dual_idxs]
            if not any(rhs):
                continue
            for row, i in zip(inv_gram, idxs):
                val = sum(a * b for a, b in zip(row, rhs))
                if val:
                    coeffs[self.basis[i].name] = val
        # full verification: the reconstruction must reproduce the input
        recon = self.element_matrix(coeffs)
        d = 2 * self.n
        for r in range(d):
            for c in range(d):
                if recon[r][c] != matrix[r][c]:
                    raise InconsistencyError(
                        f"matrix is not in the span of the basis (entry {r},{c})"
                    )
        return coeffs

    def _trace_matrix(self, matrix, j):
        total = Fraction(0)
        for r, c, v in self.basis[j].entries:
            total += v * matrix[c][r]
        return total

    def bracket(self, a, b):
        """Bracket of two elements given as name->coefficient dicts."""
        entries_a = []
        entries_b = []
        for name, coef in a.items():
            for r, c, v in self.basis[self.index[name]].entries:
                entries_a.append((r, c, Fraction(coef) * v))
        for name, coef in b.items():
            for r, c, v in self.basis[self.index[name]].entries:
                entries_b.append((r, c, Fraction(coef) * v))
        rows_b = {}
        for r, c, v in entries_b:
            rows_b.setdefault(r, []).append((c, v))
        rows_a = {}
        for r, c, v in entries_a:
            rows_a.setdefault(r, []).append((c, v))
        ab = _sparse_mul(entries_a, rows_b)
        ba = _sparse_mul(entries_b, rows_a)
        for key, v in ba.items():
            s = ab.get(key, 0) - v
            if s:
                ab[key] = s
            else:
                ab.pop(key, None)
        d = 2 * self.n
        comm = ela.zeros(d, d)
        for (r, c), v in ab.items():
            comm[r][c] = v
        return self.expand(comm)

    def bracket_names(self, name_a, name_b):
        return self.bracket({name_a: 1}, {name_b: 1})

    # --- verification ----------------------------------------------------------
    def verify_structure_constants(self):
        """Check the tabulated bracket relations exactly.

        Returns a list of (relation, ok) pairs, one per tabulated relation
        (quantified over all valid indices), plus a trailing summary flag.
        """
        m = self.m
        om = self.omega
        ok_all = {}

        def check(label, name_a, name_b, want):
            ok_all.setdefault(label, True)
            try:
                got = self.bracket_names(name_a, name_b)
            except InconsistencyError:
                ok_all[label] = False
                return
            if got != {k: v for k, v in want.items() if v}:
                ok_all[label] = False

        for i in range(1, m + 1):
            for j in range(1, m + 1):
                check(
                    "[a_i,a_j] = -2 omega_ij t(0,-2)",
                    f"a{i}", f"a{j}", {"t(0,-2)": -2 * om[i - 1][j - 1]},
                )
                check(
                    "[a_i,e_j] = -omega_ij t(-1,-2)",
                    f"a{i}", f"e{j}", {"t(-1,-2)": -om[i - 1][j - 1]},
                )
                check(
                    "[e_i,e_j] = -2 omega_ij t(-2,-2)",
                    f"e{i}", f"e{j}", {"t(-2,-2)": -2 * om[i - 1][j - 1]},
                )
        for i in range(1, m + 1):
            check("[a_i,t(-1,0)] = e_i", f"a{i}", "t(-1,0)", {f"e{i}": Fraction(1)})
            check("[a_i,t(0,-2)] = 0", f"a{i}", "t(0,-2)", {})
            check("[a_i,t(-1,-2)] = 0", f"a{i}", "t(-1,-2)", {})
            check("[t(-1,0),e_i] = 0", "t(-1,0)", f"e{i}", {})
        check("[t(-1,0),t(0,-2)] = -t(-1,-2)", "t(-1,0)", "t(0,-2)", {"t(-1,-2)": Fraction(-1)})
        check("[t(-1,0),t(-1,-2)] = -2 t(-2,-2)", "t(-1,0)", "t(-1,-2)", {"t(-2,-2)": Fraction(-2)})
        order = [
            "[a_i,a_j] = -2 omega_ij t(0,-2)",
            "[a_i,t(-1,0)] = e_i",
            "[t(-1,0),t(0,-2)] = -t(-1,-2)",
            "[a_i,t(0,-2)] = 0",
            "[a_i,e_j] = -omega_ij t(-1,-2)",
            "[a_i,t(-1,-2)] = 0",
            "[t(-1,0),t(-1,-2)] = -2 t(-2,-2)",
            "[t(-1,0),e_i] = 0",
            "[e_i,e_j] = -2 omega_ij t(-2,-2)",
        ]
        return [(name, ok_all.get(name, True)) for name in order]

    def killing(self, a, b):
        """Killing form B(X, Y) = (2n + 2) tr(XY) on coefficient dicts."""
        ma = self.element_matrix(a)
        mb = self.element_matrix(b)
        return (2 * self.n + 2) * ela.trace(ela.matmul(ma, mb))

    # --- G0 action ---------------------------------------------------------------
    def g0_matrix(self, g):
        """Group element blockdiag(c, d, C, 1/d, 1/c) realizing (C, c, d)."""
        m = self.m
        d = 2 * self.n
        C = [list(map(Fraction, row)) for row in g.C]
        if m:
            lhs = ela.matmul(ela.matmul(ela.transpose(C), [list(r) for r in self.omega]), C)
            if not ela.mat_eq(lhs, [list(r) for r in self.omega]):
                raise ValueError("C must satisfy C^T omega C = omega exactly")
        if g.c == 0 or g.d == 0:
            raise ValueError("c and d must be nonzero")
        P = ela.zeros(d, d)
        P[0][0] = Fraction(g.c)
        P[1][1] = Fraction(g.d)
        # the transpose embedding makes the adjoint action transform the
        # a_i and e_i coefficient vectors by C in row-by-column indexing
        for i in range(m):
            for j in range(m):
                P[2 + i][2 + j] = C[j][i]
        P[d - 2][d - 2] = Fraction(1) / Fraction(g.d)
        P[d - 1][d - 1] = Fraction(1) / Fraction(g.c)
        return P

    def adjoint_g0(self, g, x):
        """Adjoint action of (C, c, d) on a coefficient dict supported in g_-."""
        P = self.g0_matrix(g)
        Pinv = ela.inverse(P)
        return self.expand(ela.matmul(ela.matmul(P, self.element_matrix(x)), Pinv))

    # --- graded automorphisms -------------------------------------------------
    def negative_names(self):
        return (
            ["t(-1,0)"]
            + [f"a{i}" for i in range(1, self.m + 1)]
            + [f"e{i}" for i in range(1, self.m + 1)]
            + ["t(0,-2)", "t(-1,-2)", "t(-2,-2)"]
        )

    def solve_graded_automorphism(self, candidate):
        """Decide whether a Z-graded linear map on g_- is a Lie automorphism.

        `candidate` maps basis names of g_- to coefficient dicts on g_-.  On
        acceptance returns (a, b, A) with A_i^p A_j^q omega_pq = b omega_ij,
        certifying along the way that the map respects the Z^2-grading; on
        rejection returns None together with a reason string.
        """
        m = self.m
        names = self.negative_names()
        z_of = {nm: self.z_degree(self.basis[self.index[nm]].bidegree) for nm in names}
        for nm in names:
            img = candidate.get(nm, {})
            for target, coef in img.items():
                if coef and z_of[target] != z_of[nm]:
                    return None, f"image of {nm} leaves its Z-graded block"

        def img(nm):
            return {k: Fraction(v) for k, v in candidate.get(nm, {}).items() if v}

        # Lie automorphism: phi([x, y]) = [phi x, phi y] on all basis pairs
        for i, nm_a in enumerate(names):
            for nm_b in names[i + 1:]:
                lhs = {}
                for ta, ca in img(nm_a).items():
                    for tb, cb in img(nm_b).items():
                        for t, c in self.bracket_names(ta, tb).items():
                            s = lhs.get(t, 0) + ca * cb * c
                            if s:
                                lhs[t] = s
                            else:
                                lhs.pop(t, None)
                rhs = {}
                for t, c in self.bracket_names(nm_a, nm_b).items():
                    for t2, c2 in img(t).items():
                        s = rhs.get(t2, 0) + c * c2
                        if s:
                            rhs[t2] = s
                        else:
                            rhs.pop(t2, None)
                if lhs != rhs:
                    return None, f"bracket relation fails on ({nm_a}, {nm_b})"

        a = img("t(-1,0)").get("t(-1,0)", Fraction(0))
        b = img("t(0,-2)").get("t(0,-2)", Fraction(0))
        if a == 0 or b == 0:
            return None, "degenerate diagonal action"
        A = [[img(f"a{i}").get(f"a{j}", Fraction(0)) for j in range(1, m + 1)] for i in range(1, m + 1)]
        # certify the Z^2-graded form of the map
        for i in range(1, m + 1):
            if img("t(-1,0)").get(f"a{i}", 0) or img(f"a{i}").get("t(-1,0)", 0):
                return None, "map mixes t(-1,0) with the a_i"
            if img("t(0,-2)").get(f"e{i}", 0) or img(f"e{i}").get("t(0,-2)", 0):
                return None, "map mixes t(0,-2) with the e_i"
            for j in range(1, m + 1):
                if img(f"e{i}").get(f"e{j}", Fraction(0)) != a * A[i - 1][j - 1]:
                    return None, "e-block is not a times the a-block"
        if img("t(-1,-2)").get("t(-1,-2)", Fraction(0)) != a * b:
            return None, "t(-1,-2) scale is not a*b"
        if img("t(-2,-2)").get("t(-2,-2)", Fraction(0)) != a * a * b:
            return None, "t(-2,-2) scale is not a^2 b"
        om = [list(r) for r in self.omega]
        lhs = ela.matmul(ela.matmul(A, om), ela.transpose(A))
        want = ela.scalarmul(b, om)
        # A_i^p A_j^q omega_pq = b omega_ij  reads (A omega A^T)_ij in matrix form
        if not ela.mat_eq(lhs, want):
            return None, "A does not scale omega by b"
        return (a, b, _freeze(A)), None


def build(n, parabolic=P12, omega=None):
    return GradedLieAlgebra(n, parabolic, omega)
