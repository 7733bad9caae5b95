"""Cochain complex of the negative nilpotent part with adjoint values.

Cochains C^n(g_-, g) are stored sparsely: strictly increasing tuples of
minus-basis indices mapped to value vectors over the full basis
(antisymmetry is structural).  The differential is the Chevalley-
Eilenberg formula; the codifferential is implemented twice, once
through the dual-basis formula ((d*phi)_1 - 1/2 (d*phi)_2) and once
through the wedge picture on Lambda^n p_+ (x) g, where it is the Lie
homology boundary of p_+.  The two routes are exact cross-oracles.

Sign conventions: the identification of C^2 with Lambda^2 p_+ (x) g
carries a global factor -1 (and C^3 a factor +1) so that the wedge
boundary reproduces the dual-basis codifferential exactly and the
Hodge decomposition of the Kostant Laplacian verifies; the kernel
statements are insensitive to these factors.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .exact import kernel_basis
from .gradedlie import GradedLieAlgebra

_F0 = Fraction(0)
_F1 = Fraction(1)

# identification signs between C^n(g_-, g) and Lambda^n p_+ (x) g
_WEDGE_SIGN = {1: 1, 2: -1, 3: 1}


class Cochain:
    """Element of C^n(g_-, g) with exact coefficients."""

    __slots__ = ("alg", "degree", "coeffs")

    def __init__(self, alg: GradedLieAlgebra, degree: int, coeffs=None):
        self.alg = alg
        self.degree = degree
        self.coeffs = {}
        if coeffs:
            for key, vec in coeffs.items():
                v = {m: _F0 + c for m, c in vec.items() if c}
                if v:
                    self.coeffs[tuple(key)] = v

    def copy(self):
        return Cochain(self.alg, self.degree, {k: dict(v) for k, v in self.coeffs.items()})

    def is_zero(self):
        return not self.coeffs

    def add_term(self, key, vec, scale=_F1):
        if not vec:
            return
        tgt = self.coeffs.setdefault(key, {})
        for m, c in vec.items():
            s = tgt.get(m, _F0) + scale * c
            if s:
                tgt[m] = s
            else:
                tgt.pop(m, None)
        if not tgt:
            del self.coeffs[key]

    def __add__(self, o):
        out = self.copy()
        for k, v in o.coeffs.items():
            out.add_term(k, v)
        return out

    def __sub__(self, o):
        out = self.copy()
        for k, v in o.coeffs.items():
            out.add_term(k, v, _F1 * -1)
        return out

    def scale(self, r):
        r = _F0 + r
        return Cochain(
            self.alg,
            self.degree,
            {k: {m: c * r for m, c in v.items()} for k, v in self.coeffs.items()},
        )

    def value_at(self, key):
        """Value on a possibly unsorted index tuple (antisymmetric lookup)."""
        if len(set(key)) != len(key):
            return {}
        order = sorted(range(len(key)), key=lambda t: key[t])
        sign = _perm_sign(order)
        skey = tuple(key[t] for t in order)
        vec = self.coeffs.get(skey)
        if not vec:
            return {}
        return vec if sign == 1 else {m: -c for m, c in vec.items()}

    def eval_vectors(self, *args):
        """Multilinear evaluation on coefficient dicts over the basis."""
        out = {}
        items = [list(a.items()) for a in args]

        def rec(pos, idx, coef):
            if pos == len(items):
                vec = self.value_at(tuple(idx))
                for m, c in vec.items():
                    s = out.get(m, _F0) + coef * c
                    if s:
                        out[m] = s
                    else:
                        out.pop(m, None)
                return
            for i, a in items[pos]:
                rec(pos + 1, idx + [i], coef * a)

        rec(0, [], _F1)
        return out

    def homogeneity_split(self):
        """Decomposition by grading weight; keys are the weights l."""
        alg = self.alg
        parts = {}
        for key, vec in self.coeffs.items():
            base = sum(alg.degrees[i] for i in key)
            for m, c in vec.items():
                l = alg.degrees[m] - base
                part = parts.setdefault(l, Cochain(alg, self.degree))
                part.add_term(key, {m: c})
        return parts

    def support_degrees(self):
        return sorted(self.homogeneity_split())

    def __eq__(self, o):
        return (
            isinstance(o, Cochain)
            and self.alg is o.alg
            and self.degree == o.degree
            and (self - o).is_zero()
        )


def _perm_sign(order):
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _insert_sorted(tup, x):
    """Insert x into the sorted tuple; returns (position, new tuple) or None."""
    if x in tup:
        return None
    pos = 0
    while pos < len(tup) and tup[pos] < x:
        pos += 1
    return pos, tup[:pos] + (x,) + tup[pos:]


def differential(phi: Cochain) -> Cochain:
    """Chevalley-Eilenberg differential C^n -> C^(n+1)."""
    alg = phi.alg
    n = phi.degree
    out = Cochain(alg, n + 1)
    minus = alg.minus_indices()
    # bracket-to-minus tables: for each minus index m, pairs (a, b, coeff)
    br_to = _bracket_to_minus(alg)
    for key, vec in phi.coeffs.items():
        # first sum: (-1)^i [X_i, phi(rest)]
        for x in minus:
            ins = _insert_sorted(key, x)
            if ins is None:
                continue
            pos, tkey = ins
            bracket = alg.bracket_vec({x: _F1}, vec)
            if bracket:
                out.add_term(tkey, bracket, _F1 * ((-1) ** pos))
        # second sum: (-1)^(i+j) phi([X_i, X_j], rest)
        for t, mm in enumerate(key):
            rest = key[:t] + key[t + 1:]
            sign_front = (-1) ** t
            for a, b, c in br_to.get(mm, ()):
                if a in rest or b in rest:
                    continue
                _, t1 = _insert_sorted(rest, a)
                _, tkey = _insert_sorted(t1, b)
                i = tkey.index(a)
                j = tkey.index(b)
                out.add_term(tkey, vec, c * ((-1) ** (i + j)) * sign_front)
    return out


def _bracket_to_minus(alg):
    cache = getattr(alg, "_br_to_minus", None)
    if cache is not None:
        return cache
    minus = alg.minus_indices()
    table = {}
    for ia, a in enumerate(minus):
        for b in minus[ia + 1:]:
            for m, c in alg.bracket_indices(a, b).items():
                table.setdefault(m, []).append((a, b, c))
    alg._br_to_minus = table
    return table


def _dual_tables(alg):
    """Cached dual basis and [e_m, e^alpha]_- expansions."""
    cache = getattr(alg, "_dual_tables", None)
    if cache is not None:
        return cache
    minus, duals = alg.dual_basis()
    pos_of = {m: t for t, m in enumerate(minus)}
    lower = []  # lower[t][s] = coeffs of [e_minus_t, e^s]_- over minus positions
    for m in minus:
        row = []
        for dual in duals:
            br = alg.bracket_vec({m: _F1}, dual)
            row.append({pos_of[i]: c for i, c in br.items() if alg.degrees[i] < 0})
        lower.append(row)
    cache = (minus, duals, pos_of, lower)
    alg._dual_tables = cache
    return cache


def codifferential_minus(phi: Cochain):
    """Both parts of the dual-basis codifferential on C^2.

    Returns (part1, part2) as degree-1 cochains; the codifferential is
    part1 - 1/2 part2.
    """
    if phi.degree != 2:
        raise ValueError("codifferential_minus expects a degree-2 cochain")
    alg = phi.alg
    minus, duals, pos_of, lower = _dual_tables(alg)
    part1 = Cochain(alg, 1)
    for (a, b), vec in phi.coeffs.items():
        # X = e_a with alpha = b, and X = e_b with alpha = a (antisymmetry)
        part1.add_term((a,), alg.bracket_vec(vec, duals[pos_of[b]]))
        part1.add_term((b,), alg.bracket_vec(vec, duals[pos_of[a]]), -_F1)
    part2 = Cochain(alg, 1)
    for t, m in enumerate(minus):
        vec = codiff_part2_at(phi, {m: _F1})
        if vec:
            part2.add_term((m,), vec)
    return part1, part2


def codiff_part2_at(phi: Cochain, yvec):
    """Sum over alpha of phi([Y, e^alpha]_-, e_alpha) for an element Y."""
    alg = phi.alg
    minus, duals, pos_of, lower = _dual_tables(alg)
    out = {}
    for s, dual in enumerate(duals):
        br = alg.bracket_vec(yvec, dual)
        br_minus = {i: c for i, c in br.items() if alg.degrees[i] < 0}
        if not br_minus:
            continue
        vec = phi.eval_vectors(br_minus, {minus[s]: _F1})
        for m, c in vec.items():
            acc = out.get(m, _F0) + c
            if acc:
                out[m] = acc
            else:
                out.pop(m, None)
    return out


def codifferential(phi: Cochain) -> Cochain:
    """Total codifferential part1 - 1/2 part2 on C^2."""
    p1, p2 = codifferential_minus(phi)
    return p1 - p2.scale(Fraction(1, 2))


def _wedge_boundary(alg, n, coeffs):
    """Lie homology boundary on Lambda^n p_+ (x) g in dual-basis coords.

    ``coeffs``: {increasing minus-position tuple: value vector}; returns
    the same structure for degree n-1.
    """
    minus, duals, pos_of, lower = _dual_tables(alg)
    out = {}

    def add(key, vec, scl):
        tgt = out.setdefault(key, {})
        for m, c in vec.items():
            s = tgt.get(m, _F0) + scl * c
            if s:
                tgt[m] = s
            else:
                tgt.pop(m, None)
        if not tgt:
            del out[key]

    # [e^alpha, e^beta] expansion over dual positions: B([.,.], e_gamma)
    pair_cache = getattr(alg, "_dual_pair_brackets", None)
    if pair_cache is None:
        pair_cache = {}
        for i in range(len(duals)):
            for j in range(i + 1, len(duals)):
                br = alg.bracket_vec(duals[i], duals[j])
                exp = {}
                for t, m in enumerate(minus):
                    val = alg.killing_vec(br, {m: _F1})
                    if val:
                        exp[t] = val
                if exp:
                    pair_cache[(i, j)] = exp
        alg._dual_pair_brackets = pair_cache
    for key, vec in coeffs.items():
        for t, zi in enumerate(key):
            rest = key[:t] + key[t + 1:]
            sgn = _F1 * ((-1) ** t)
            # (-1)^i Z_1 ... ^ ... Z_k (x) [Z_i, A]   (0-based: (-1)^t matches
            # the alternating boundary with the k=2 display)
            bracket = alg.bracket_vec(duals[zi], vec)
            if bracket:
                add(rest, bracket, -sgn)
        for t in range(len(key)):
            for u in range(t + 1, len(key)):
                exp = pair_cache.get((min(key[t], key[u]), max(key[t], key[u])))
                if not exp:
                    continue
                flip = 1 if key[t] < key[u] else -1
                rest = tuple(x for s, x in enumerate(key) if s != t and s != u)
                for pos, c in exp.items():
                    ins = _insert_sorted(rest, pos)
                    if ins is None:
                        continue
                    ppos, tkey = ins
                    add(
                        tkey,
                        vec,
                        c * flip * ((-1) ** (t + u)) * ((-1) ** ppos),
                    )
    return out


def codifferential_wedge(phi: Cochain) -> Cochain:
    """Codifferential via the wedge picture, degrees 1..3."""
    n = phi.degree
    if n not in (1, 2, 3):
        raise ValueError("wedge codifferential defined for degrees 1..3")
    alg = phi.alg
    minus, duals, pos_of, lower = _dual_tables(alg)
    coeffs = {
        tuple(pos_of[i] for i in key): vec for key, vec in phi.coeffs.items()
    }
    sign_in = _WEDGE_SIGN[n]
    sign_out = _WEDGE_SIGN.get(n - 1, 1)
    if sign_in != 1:
        coeffs = {k: {m: sign_in * c for m, c in v.items()} for k, v in coeffs.items()}
    bnd = _wedge_boundary(alg, n, coeffs)
    out = Cochain(alg, n - 1)
    for key, vec in bnd.items():
        out.add_term(tuple(minus[t] for t in key), vec, _F1 * sign_out)
    return out


def bracket_tensor_id(phi: Cochain) -> Cochain:
    """Wedge-picture map Z1 ^ Z2 (x) A -> [Z1, Z2] (x) A on C^2.

    Equals -1/2 of the codifferential's second part under the duality
    (documented sign convention).
    """
    if phi.degree != 2:
        raise ValueError("degree-2 cochains only")
    alg = phi.alg
    minus, duals, pos_of, lower = _dual_tables(alg)
    _wedge_boundary(alg, 2, {})  # ensures the dual pair brackets are cached
    pair_cache = alg._dual_pair_brackets
    out = Cochain(alg, 1)
    for (a, b), vec in phi.coeffs.items():
        i, j = pos_of[a], pos_of[b]
        exp = pair_cache.get((min(i, j), max(i, j)))
        if not exp:
            continue
        flip = 1 if i < j else -1
        for pos, c in exp.items():
            out.add_term((minus[pos],), vec, c * flip)
    return out


# ---------------------------------------------------------------------------
# homogeneity blocks, Laplacian, harmonic spaces
# ---------------------------------------------------------------------------


def cochain_space_dim(alg, n):
    from math import comb

    return comb(len(alg.minus_indices()), n) * alg.dim


def block_basis(alg, n, l):
    """Ordered (key, value-index) pairs of the homogeneity-l block of C^n."""
    from itertools import combinations

    minus = alg.minus_indices()
    out = []
    for key in combinations(minus, n):
        base = sum(alg.degrees[i] for i in key)
        for m in range(alg.dim):
            if alg.degrees[m] - base == l:
                out.append((key, m))
    return out


def homogeneity_range(alg, n):
    from itertools import combinations

    minus = alg.minus_indices()
    degs = sorted({alg.degrees[m] for m in range(alg.dim)})
    sums = sorted({sum(alg.degrees[i] for i in key) for key in combinations(minus, n)})
    if not sums:
        return []
    lo = degs[0] - sums[-1]
    hi = degs[-1] - sums[0]
    return [l for l in range(lo, hi + 1) if block_basis(alg, n, l)]


def _basis_cochain(alg, n, key, m):
    return Cochain(alg, n, {key: {m: _F1}})


def _matrix_of(op, alg, n_src, l, src_basis, tgt_index):
    """Rows of the operator on the block, as sparse {col: Fraction} dicts
    keyed by target (key, value) pairs."""
    rows = {}
    for col, (key, m) in enumerate(src_basis):
        img = op(_basis_cochain(alg, n_src, key, m))
        for tkey, vec in img.coeffs.items():
            for tm, c in vec.items():
                pos = tgt_index.get((tkey, tm))
                if pos is None:
                    raise AssertionError("operator left the homogeneity block")
                rows.setdefault(pos, {})[col] = c
    return rows


def laplacian_block(alg, n, l):
    """Exact sparse rows of the Kostant Laplacian on the (n, l) block."""
    src = block_basis(alg, n, l)
    if not src:
        return []
    down = block_basis(alg, n - 1, l)
    up = block_basis(alg, n + 1, l)
    idx_src = {km: t for t, km in enumerate(src)}
    idx_down = {km: t for t, km in enumerate(down)}
    idx_up = {km: t for t, km in enumerate(up)}

    cod_n = _matrix_of(codifferential_wedge, alg, n, l, src, idx_down)
    del_dn = _matrix_of(differential, alg, n - 1, l, down, idx_src)
    del_n = _matrix_of(differential, alg, n, l, src, idx_up)
    cod_up = _matrix_of(codifferential_wedge, alg, n + 1, l, up, idx_src)

    dim = len(src)

    def compose(left, right):
        # left, right: {row: {col: val}}; returns rows of left . right
        out = [dict() for _ in range(dim)]
        for r, lrow in left.items():
            acc = out[r]
            for mid, lv in lrow.items():
                rrow = right.get(mid)
                if not rrow:
                    continue
                for c, rv in rrow.items():
                    s = acc.get(c, _F0) + lv * rv
                    if s:
                        acc[c] = s
                    else:
                        acc.pop(c, None)
        return out

    term1 = compose(del_dn, cod_n)
    term2 = compose(cod_up, del_n)
    for r in range(dim):
        row = term1[r]
        for c, v in term2[r].items():
            s = row.get(c, _F0) + v
            if s:
                row[c] = s
            else:
                row.pop(c, None)
    return term1


def harmonic_space(alg, n, l):
    """Exact kernel of the Laplacian on the homogeneity-l block of C^n.

    Returns (dimension, basis cochains, block basis).
    """
    src = block_basis(alg, n, l)
    if not src:
        return 0, [], src
    rows = laplacian_block(alg, n, l)
    vecs = kernel_basis(rows, len(src))
    cochains = []
    for vec in vecs:
        c = Cochain(alg, n)
        for t, v in enumerate(vec):
            if v:
                key, m = src[t]
                c.add_term(key, {m: v})
        cochains.append(c)
    return len(vecs), cochains, src


def contained_in_wedge_g0(alg, coch: Cochain) -> bool:
    """True when every term has both inputs in g_-1 and value in g_0."""
    for (a, b), vec in coch.coeffs.items():
        if alg.degrees[a] != -1 or alg.degrees[b] != -1:
            return False
        if any(alg.degrees[m] != 0 for m in vec):
            return False
    return True


def _rank_of_vectors(vectors, dim):
    if not vectors:
        return 0
    return dim - len(kernel_basis(vectors, dim))


def hodge_check(alg, n):
    """Exact Hodge-decomposition check on C^n, blockwise by homogeneity.

    Verifies dim im(del) + dim ker(box) + dim im(cod) = dim C^n and the
    pairwise triviality of intersections, using exact ranks.
    """
    total = cochain_space_dim(alg, n)
    covered = 0
    per_block = {}
    ok = True
    for l in homogeneity_range(alg, n):
        src = block_basis(alg, n, l)
        idx_src = {km: t for t, km in enumerate(src)}
        down = block_basis(alg, n - 1, l)
        up = block_basis(alg, n + 1, l)
        dim = len(src)
        covered += dim
        im_del = []
        for key, m in down:
            img = differential(_basis_cochain(alg, n - 1, key, m))
            im_del.append(_coords_in_block(img, idx_src, dim))
        im_cod = []
        for key, m in up:
            img = codifferential_wedge(_basis_cochain(alg, n + 1, key, m))
            im_cod.append(_coords_in_block(img, idx_src, dim))
        hdim, hbasis, _ = harmonic_space(alg, n, l)
        hvecs = [_coords_in_block(c, idx_src, dim) for c in hbasis]
        r_del = _rank_of_vectors([v for v in im_del if any(v)], dim)
        r_cod = _rank_of_vectors([v for v in im_cod if any(v)], dim)
        segs = {
            "im_del": ([v for v in im_del if any(v)], r_del),
            "ker_box": (hvecs, hdim),
            "im_cod": ([v for v in im_cod if any(v)], r_cod),
        }
        sum_ok = r_del + hdim + r_cod == dim
        pair_ok = True
        names = list(segs)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                va, ra = segs[names[i]]
                vb, rb = segs[names[j]]
                if _rank_of_vectors(va + vb, dim) != ra + rb:
                    pair_ok = False
        per_block[l] = {
            "dim": dim,
            "im_del": r_del,
            "ker_box": hdim,
            "im_cod": r_cod,
            "sum_ok": sum_ok,
            "pairwise_trivial": pair_ok,
        }
        ok = ok and sum_ok and pair_ok
    ok = ok and covered == total
    return {"degree": n, "dim_total": total, "blocks": per_block, "pass": ok}


def _coords_in_block(coch, idx, dim):
    vec = [_F0] * dim
    for key, valvec in coch.coeffs.items():
        for m, c in valvec.items():
            pos = idx.get((key, m))
            if pos is None:
                raise AssertionError("cochain leaves the block")
            vec[pos] = c
    return vec


def random_cochain(alg, n, seed, lo=-3, hi=3, value_indices=None, keys=None):
    """Deterministic small-integer cochain for seeded tests."""
    from itertools import combinations

    rng = random.Random(seed)
    minus = alg.minus_indices()
    values = list(range(alg.dim)) if value_indices is None else list(value_indices)
    out = Cochain(alg, n)
    for key in keys if keys is not None else combinations(minus, n):
        vec = {}
        for m in values:
            c = rng.randint(lo, hi)
            if c:
                vec[m] = Fraction(c)
        if vec:
            out.add_term(tuple(key), vec)
    return out


def harmonic_report(alg, n_param, degree, homogeneities=None):
    """HarmonicReport rows for the CLI and tests."""
    rows = []
    hr = homogeneity_range(alg, degree)
    for l in hr if homogeneities is None else homogeneities:
        dim, basis, _ = harmonic_space(alg, degree, l)
        contained = (
            all(contained_in_wedge_g0(alg, c) for c in basis) if degree == 2 and dim else False
        )
        rows.append(
            {
                "algebra": alg.name,
                "n_param": n_param,
                "degree": degree,
                "homogeneity": l,
                "dim": dim,
                "contained_in_L2g0": bool(contained),
            }
        )
    return rows
