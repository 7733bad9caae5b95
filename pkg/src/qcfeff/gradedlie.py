"""Graded matrix Lie algebras in Witt bases, with exact structure data.

Three families are built from one constructor: the symplectic unitary
algebra of an indefinite quaternionic hermitian form (|2|-graded), the
special unitary algebra of a complex form (|2|-graded), and the
orthogonal algebra of a real form (|1|-graded).  The defining form is
the modified Witt form: light-like dual pairs at both ends, an
orthonormal middle block.  Elements satisfy  X^t S + S conj(X) = 0
(plus zero trace in the complex case), and the grading element is
diag(1, 0, ..., 0, -1).

Basis matrices are chosen with entries among the scalar units, ordered
by ascending degree and then by a fixed enumeration of entry positions,
so structure constants are reproducible.  The Killing form is computed
intrinsically as trace(ad . ad) on the abstract basis.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import (
    ExactMatrix,
    Quaternion,
    Q_UNITS,
    SpanSolver,
    kernel_basis,
    realify_C,
    realify_H,
    solve_exact,
)

_F0 = Fraction(0)
_F1 = Fraction(1)

_UNITS_BY_KIND = {
    "rational": ("1",),
    "complex": ("1", "i"),
    "quaternion": ("1", "i", "j", "k"),
}
_IM_UNITS_BY_KIND = {
    "rational": (),
    "complex": ("i",),
    "quaternion": ("i", "j", "k"),
}


class ClosureError(RuntimeError):
    """A bracket left the exact span of the basis (construction bug)."""


class SingularPairingError(RuntimeError):
    """The Killing pairing between opposite degrees degenerated."""


def witt_form(m: int, q: int) -> ExactMatrix:
    """Form matrix with q hyperbolic pairs (ends) and orthonormal middle."""
    ent = {}
    for a in range(m):
        ent[(a, _witt_tau(m, q, a))] = Quaternion(1)
    return ExactMatrix(m, m, ent)


def _witt_tau(m, q, a):
    if a < q or a >= m - q:
        return m - 1 - a
    return a


def witt_double_perm(m: int, q: int):
    """Index map w -> f for realifying a Witt basis (size m, q light pairs).

    The doubled space carries the form diag(S, S); the returned
    permutation reorders the 2m realified coordinates into a Witt basis
    with 2q light pairs, Re/Im interleaved at the front and mirrored at
    the back.
    """
    M = m
    pi = [0] * (2 * m)
    for a in range(q):
        pi[2 * a] = a
        pi[2 * a + 1] = M + a
        pi[2 * M - 1 - 2 * a] = m - 1 - a
        pi[2 * M - 2 - 2 * a] = M + m - 1 - a
    mids = list(range(q, m - q)) + list(range(M + q, M + m - q))
    for t, f in enumerate(mids):
        pi[2 * q + t] = f
    return pi


def perm_matrix(pi) -> ExactMatrix:
    return ExactMatrix(len(pi), len(pi), {(t, f): Quaternion(1) for t, f in enumerate(pi)})


def _diag_weight(m, a):
    if a == 0:
        return 1
    if a == m - 1:
        return -1
    return 0


def _orbit_partner(m, q, a, b):
    return (_witt_tau(m, q, b), _witt_tau(m, q, a))


def _enumerate_basis(kind, m, q):
    """Yield (label, degree, native ExactMatrix) in canonical order."""
    units = _UNITS_BY_KIND[kind]
    im_units = _IM_UNITS_BY_KIND[kind]
    by_degree = {}
    seen = set()
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            if (a, b) in seen:
                continue
            pa, pb = _orbit_partner(m, q, a, b)
            seen.add((a, b))
            seen.add((pa, pb))
            deg = _diag_weight(m, a) - _diag_weight(m, b)
            gens = by_degree.setdefault(deg, [])
            if (pa, pb) == (a, b):
                for u in im_units:
                    uq = Q_UNITS[u]
                    gens.append((f"e({a},{b}){u}", {(a, b): uq}))
            else:
                for u in units:
                    uq = Q_UNITS[u]
                    ent = {(a, b): uq, (pa, pb): -uq.conj()}
                    gens.append((f"e({a},{b}){u}", ent))
    # diagonal generators, degree 0
    diag = by_degree.setdefault(0, [])
    trace_carriers = []  # (label, entries, trace coefficient of i-part)
    for a in range(q):
        ta = _witt_tau(m, q, a)
        for u in units:
            uq = Q_UNITS[u]
            ent = {(a, a): uq, (ta, ta): -uq.conj()}
            if kind == "complex" and u == "i":
                trace_carriers.append((f"d({a}){u}", ent, 2))
            else:
                diag.append((f"d({a}){u}", ent))
    for a in range(q, m - q):
        for u in im_units:
            uq = Q_UNITS[u]
            ent = {(a, a): uq}
            if kind == "complex":
                trace_carriers.append((f"d({a}){u}", ent, 1))
            else:
                diag.append((f"d({a}){u}", ent))
    # complex case: combine trace carriers into traceless differences
    for idx in range(len(trace_carriers) - 1):
        la, ea, ta = trace_carriers[idx]
        lb, eb, tb = trace_carriers[idx + 1]
        ent = {}
        for k, v in ea.items():
            ent[k] = v.scale(tb)
        for k, v in eb.items():
            ent[k] = ent.get(k, Quaternion()) + v.scale(-ta)
        diag.append((f"{la}-{lb}", ent))
    out = []
    for deg in sorted(by_degree):
        for label, ent in by_degree[deg]:
            out.append((label, deg, ExactMatrix(m, m, ent, kind)))
    return out


def _check_member(kind, m, q, mat: ExactMatrix):
    s = witt_form(m, q)
    resid = mat.transpose() * s + s * mat.conj()
    if not resid.is_zero():
        raise ClosureError("matrix fails the defining form identity")
    if kind == "complex" and not mat.trace().is_zero():
        raise ClosureError("complex matrix not trace free")


def matrix_to_coordvec(mat: ExactMatrix):
    """Flatten to {(row, col, component): Fraction} over nonzero entries."""
    out = {}
    for (i, j), v in mat.entries.items():
        for c, comp in enumerate(v.comps):
            if comp:
                out[(i, j, c)] = comp
    return out


class GradedLieAlgebra:
    """A |k|-graded matrix Lie algebra with exact structure constants."""

    def __init__(self, name, kind, m, q, ambient_map=None):
        self.name = name
        self.kind = kind
        self.m = m
        self.q = q
        basis = _enumerate_basis(kind, m, q)
        for _, _, mat in basis:
            _check_member(kind, m, q, mat)
        self.labels = [b[0] for b in basis]
        self.degrees = [b[1] for b in basis]
        self.native = [b[2] for b in basis]
        self.dim = len(basis)
        self.k = max(abs(d) for d in self.degrees)
        self.by_degree = {}
        for i, d in enumerate(self.degrees):
            self.by_degree.setdefault(d, []).append(i)
        if ambient_map is None:
            self.ambient = list(self.native)
        else:
            self.ambient = [ambient_map(mat) for mat in self.native]
        self._solvers = {
            d: SpanSolver([matrix_to_coordvec(self.native[i]) for i in idxs])
            for d, idxs in self.by_degree.items()
        }
        self._bracket_table = self._build_brackets()
        self.killing = self._build_killing()
        self.grading_element = self._find_grading_element()
        self._dual = None

    # -- construction ---------------------------------------------------

    def _coords_in_degree(self, mat: ExactMatrix, deg):
        vec = matrix_to_coordvec(mat)
        if not vec:
            return {}
        idxs = self.by_degree.get(deg)
        if idxs is None:
            raise ClosureError("bracket landed in missing degree %d" % deg)
        coeffs = self._solvers[deg].coords(vec)
        return {idxs[t]: c for t, c in enumerate(coeffs) if c}

    def _build_brackets(self):
        table = {}
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                deg = self.degrees[i] + self.degrees[j]
                mat = self.native[i].commutator(self.native[j])
                if mat.is_zero():
                    continue
                if abs(deg) > self.k:
                    raise ClosureError("degree additivity violated")
                try:
                    coeffs = self._coords_in_degree(mat, deg)
                except ValueError as exc:
                    raise ClosureError("bracket closure failed") from exc
                table[(i, j)] = coeffs
                table[(j, i)] = {l: -c for l, c in coeffs.items()}
        return table

    def _build_killing(self):
        n = self.dim
        ad = []
        for i in range(n):
            rows = {}
            for j in range(n):
                br = self._bracket_table.get((i, j))
                if br:
                    rows[j] = br
            ad.append(rows)
        gram = [[_F0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                s = _F0
                for mdx, row in ad[i].items():
                    adj = ad[j]
                    for l, c in row.items():
                        other = adj.get(l)
                        if other:
                            back = other.get(mdx)
                            if back:
                                s += c * back
                gram[i][j] = s
                gram[j][i] = s
        return gram

    def _find_grading_element(self):
        zero_idxs = self.by_degree[0]
        rows, rhs = [], []
        for j in range(self.dim):
            target = {}
            for t, i in enumerate(zero_idxs):
                br = self._bracket_table.get((i, j))
                if br:
                    for l, c in br.items():
                        target.setdefault(l, {})[t] = c
            for l in range(self.dim):
                row = target.get(l, {})
                rows.append(row)
                rhs.append(Fraction(self.degrees[j]) if l == j else _F0)
        sol = solve_exact(rows, rhs, len(zero_idxs))
        if sol is None:
            raise ClosureError("no grading element found")
        return {zero_idxs[t]: c for t, c in enumerate(sol) if c}

    # -- queries ---------------------------------------------------------

    def bracket_indices(self, i, j):
        return self._bracket_table.get((i, j), {})

    def bracket_vec(self, u, v):
        """Bracket of two coefficient dicts over the basis."""
        out = {}
        table = self._bracket_table
        for i, a in u.items():
            for j, b in v.items():
                br = table.get((i, j))
                if br:
                    ab = a * b
                    for l, c in br.items():
                        s = out.get(l, _F0) + ab * c
                        if s:
                            out[l] = s
                        else:
                            out.pop(l, None)
        return out

    def killing_vec(self, u, v) -> Fraction:
        s = _F0
        for i, a in u.items():
            row = self.killing[i]
            for j, b in v.items():
                kij = row[j]
                if kij:
                    s += a * b * kij
        return s

    def degree_of_index(self, i):
        return self.degrees[i]

    def minus_indices(self):
        return [i for i in range(self.dim) if self.degrees[i] < 0]

    def plus_indices(self):
        return [i for i in range(self.dim) if self.degrees[i] > 0]

    def component(self, vec, deg):
        return {i: c for i, c in vec.items() if self.degrees[i] == deg}

    def ambient_of_vec(self, vec) -> ExactMatrix:
        n = self.ambient[0].rows
        out = ExactMatrix.zero(n, n, self.ambient[0].kind)
        for i, c in vec.items():
            out = out + self.ambient[i].scale(c)
        return out

    def native_of_vec(self, vec) -> ExactMatrix:
        out = ExactMatrix.zero(self.m, self.m, self.kind)
        for i, c in vec.items():
            out = out + self.native[i].scale(c)
        return out

    def dual_basis(self):
        """Killing-dual basis of p+ indexed like the g_- basis.

        Returns (minus_indices, duals) where duals[t] is a coefficient
        dict supported in the degree -deg block of p+ with
        B(e_alpha, e^beta) = delta exactly.
        """
        if self._dual is not None:
            return self._dual
        minus = self.minus_indices()
        duals = [None] * len(minus)
        pos_of = {i: t for t, i in enumerate(minus)}
        for d in range(1, self.k + 1):
            lo = self.by_degree.get(-d, [])
            hi = self.by_degree.get(d, [])
            if len(lo) != len(hi):
                raise SingularPairingError("unbalanced degree blocks")
            gram = [[self.killing[a][b] for b in hi] for a in lo]
            for t, a in enumerate(lo):
                rhs = [_F1 if s == t else _F0 for s in range(len(lo))]
                col = solve_exact(gram, rhs, len(hi))
                if col is None:
                    raise SingularPairingError("Killing pairing degenerate")
                duals[pos_of[a]] = {hi[s]: c for s, c in enumerate(col) if c}
        self._dual = (minus, duals)
        return self._dual

    def serialize(self):
        n = self.dim
        consts = {}
        for (i, j), row in sorted(self._bracket_table.items()):
            if i < j:
                consts["%d,%d" % (i, j)] = {
                    str(l): str(c) for l, c in sorted(row.items())
                }
        return {
            "name": self.name,
            "dimension": n,
            "depth": self.k,
            "basis": [
                {"label": self.labels[i], "degree": self.degrees[i]} for i in range(n)
            ],
            "structure_constants": consts,
        }


def _qc_ambient_map(n):
    m_cr = 2 * (n + 2)
    phi_cr = perm_matrix(witt_double_perm(n + 2, 1))
    phi_co = perm_matrix(witt_double_perm(m_cr, 2))

    def to_ambient(mat):
        cr = phi_cr * realify_H(mat) * phi_cr.transpose()
        return phi_co * realify_C(cr) * phi_co.transpose()

    return to_ambient


def _cr_ambient_map(m_cr, q_cr):
    phi_co = perm_matrix(witt_double_perm(m_cr, q_cr))

    def to_ambient(mat):
        return phi_co * realify_C(mat) * phi_co.transpose()

    return to_ambient


def build_qc(n: int) -> GradedLieAlgebra:
    """sp(n+1,1) in the quaternionic Witt basis, |2|-graded."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return GradedLieAlgebra("qc(n=%d)" % n, "quaternion", n + 2, 1, _qc_ambient_map(n))


def build_cr(p: int, q: int) -> GradedLieAlgebra:
    """su(p+1,q+1) in the complex Witt basis, |2|-graded."""
    if p < q or q < 0:
        raise ValueError("need p >= q >= 0")
    m = p + q + 2
    return GradedLieAlgebra("cr(%d,%d)" % (p, q), "complex", m, q + 1, _cr_ambient_map(m, q + 1))


def build_co(p: int, q: int) -> GradedLieAlgebra:
    """so(p+1,q+1) in the real Witt basis, |1|-graded."""
    if p < q or q < 0:
        raise ValueError("need p >= q >= 0")
    m = p + q + 2
    return GradedLieAlgebra("co(%d,%d)" % (p, q), "rational", m, q + 1)


def build_chain(n: int):
    """The nested triple for parameter n (common real ambient)."""
    return build_qc(n), build_cr(2 * n + 1, 1), build_co(4 * n + 3, 3)


def centralizer_in_degree(alg: GradedLieAlgebra, degree: int, subspace):
    """Exact basis of {X in g_degree : [Z, X] = 0 for all Z in subspace}.

    ``subspace`` is a list of coefficient dicts over the basis of alg.
    Returns a list of coefficient dicts supported in the degree block.
    """
    idxs = alg.by_degree.get(degree, [])
    if not idxs:
        return []
    rows = []
    for z in subspace:
        cols = {}
        for t, i in enumerate(idxs):
            br = alg.bracket_vec(z, {i: _F1})
            for l, c in br.items():
                cols.setdefault(l, {})[t] = c
        rows.extend(cols.values())
    if not rows:
        return [{i: _F1} for i in idxs]
    basis = kernel_basis(rows, len(idxs))
    return [
        {idxs[t]: c for t, c in enumerate(vec) if c} for vec in basis
    ]
