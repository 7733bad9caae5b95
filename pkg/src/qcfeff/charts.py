"""Jet-based pseudo-Riemannian calculus on coordinate charts.

A chart supplies a jet-evaluable metric; curvature tensors are
assembled from Taylor coefficients at sample points, which are exact to
truncation order, so residual noise comes only from float conditioning.

Sign conventions, fixed here and arbitrated by the identity suites:
R(u,v)w = [nabla_u, nabla_v]w - nabla_[u,v]w (round sphere positively
curved); the Schouten tensor solves Ric + (m-2) P + tr(P) g = 0, so the
round-sphere value is -g/2; Weyl = Riem - KulkarniNomizu(P, g), which
is trace free exactly because of the defining Schouten relation; Cotton
C(u,v,w) = (nabla_u P)(v,w) - (nabla_v P)(u,w).  The contracted Bianchi
identity then reads g^{ae} (nabla_e W)(u,v,w,e_a) = (3-m) C(u,v,w),
which weyl_divergence_residual verifies (and fits empirically).

Index layout: dg[a,b,c] = d_c g_ab, d2g[a,b,c,d] = d_c d_d g_ab,
gamma[a,b,c] = Gamma^a_bc, riem[a,b,c,d] = R^a_bcd (value slot b,
antisymmetric in c,d), r4[x,y,z,t] = g(R(x,y)z, t).
"""

from __future__ import annotations

import math

import numpy as np

from .jets import Jet, jet_space, jet_variables


class ChartError(RuntimeError):
    pass


class NotConformalKilling(ChartError):
    pass


class MetricChart:
    """Coordinate chart with a jet-evaluable metric field."""

    def __init__(self, name, dim, metric_fn, signature=None, center=None, radius=1.0):
        self.name = name
        self.dim = dim
        self.metric_fn = metric_fn
        self.signature = signature
        self.center = np.zeros(dim) if center is None else np.asarray(center, float)
        self.radius = radius

    def sample_points(self, count, seed=0):
        rng = np.random.default_rng(seed)
        pts = []
        while len(pts) < count:
            u = rng.uniform(-1.0, 1.0, self.dim)
            if float(np.dot(u, u)) <= 1.0:
                pts.append(self.center + 0.9 * self.radius * u)
        return pts

    def metric_jets(self, point, order):
        xs = jet_variables(point, order)
        rows = self.metric_fn(xs)
        sp = jet_space(self.dim, order)
        out = np.zeros((self.dim, self.dim, sp.size))
        for a in range(self.dim):
            for b in range(self.dim):
                v = rows[a][b]
                if isinstance(v, Jet):
                    out[a, b] = v.coef
                else:
                    out[a, b, 0] = float(v)
        return out

    def metric_at(self, point):
        return self.metric_jets(point, 1)[:, :, 0]

    def signature_at(self, point, tol=1e-10):
        ev = np.linalg.eigvalsh(self.metric_at(point))
        if np.any(np.abs(ev) <= tol):
            raise ChartError("metric numerically degenerate")
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    def rescaled(self, conf_fn, name=None):
        """The chart with metric exp(2 phi) g for a jet-evaluable phi."""

        def metric(xs):
            rows = self.metric_fn(xs)
            factor = (conf_fn(xs) * 2.0).exp()
            return [
                [factor * rows[a][b] for b in range(self.dim)] for a in range(self.dim)
            ]

        return MetricChart(
            name or self.name + "+rescaled",
            self.dim,
            metric,
            self.signature,
            self.center,
            self.radius,
        )


class VectorFieldOnChart:
    """Jet-evaluable vector field in chart coordinates."""

    def __init__(self, label, dim, components_fn):
        self.label = label
        self.dim = dim
        self.components_fn = components_fn

    def jets(self, point, order):
        xs = jet_variables(point, order)
        comps = self.components_fn(xs)
        sp = jet_space(self.dim, order)
        out = np.zeros((self.dim, sp.size))
        for a in range(self.dim):
            v = comps[a]
            if isinstance(v, Jet):
                out[a] = v.coef
            else:
                out[a, 0] = float(v)
        return out

    def values(self, point):
        return self.jets(point, 1)[:, 0]

    def scaled(self, factor):
        fn = self.components_fn
        return VectorFieldOnChart(
            "%s*%.6g" % (self.label, factor),
            self.dim,
            lambda xs: [c * factor for c in fn(xs)],
        )


def _deriv_index_arrays(sp, r):
    """Index and factorial arrays turning jet coefficients into d^r tensors."""
    m = sp.num_vars
    shape = (m,) * r
    pos = np.zeros(shape, dtype=np.intp)
    fac = np.zeros(shape)
    for idx in np.ndindex(shape):
        alpha = [0] * m
        for c in idx:
            alpha[c] += 1
        pos[idx] = sp.position[tuple(alpha)]
        f = 1.0
        for a in alpha:
            f *= math.factorial(a)
        fac[idx] = f
    return pos, fac


class CurvatureData:
    """Curvature tensors of a chart metric at one point."""

    def __init__(self, chart: MetricChart, point, order=3):
        self.chart = chart
        self.point = np.asarray(point, float)
        self.order = order
        m = chart.dim
        self.m = m
        sp = jet_space(m, order)
        jets = chart.metric_jets(self.point, order)
        self.g = jets[:, :, 0].copy()
        if abs(np.linalg.det(self.g)) < 1e-12:
            raise ChartError("metric degenerate at sample point")
        p1, f1 = _deriv_index_arrays(sp, 1)
        self.dg = jets[:, :, p1] * f1
        p2, f2 = _deriv_index_arrays(sp, 2)
        self.d2g = jets[:, :, p2] * f2
        if order >= 3:
            p3, f3 = _deriv_index_arrays(sp, 3)
            self.d3g = jets[:, :, p3] * f3
        else:
            self.d3g = None
        self.ginv = np.linalg.inv(self.g)
        self._build()

    def _build(self):
        g, dg, d2g, ginv = self.g, self.dg, self.d2g, self.ginv
        m = self.m
        dginv = -np.einsum("ae,efc,fb->abc", ginv, dg, ginv)
        self.dginv = dginv

        gamma_low = 0.5 * (
            dg + np.einsum("dcb->dbc", dg) - np.einsum("bcd->dbc", dg)
        )
        self.gamma = np.einsum("ad,dbc->abc", ginv, gamma_low)

        dgamma_low = 0.5 * (
            d2g + np.einsum("dcbe->dbce", d2g) - np.einsum("bcde->dbce", d2g)
        )
        self.dgamma = np.einsum("ad,dbce->abce", ginv, dgamma_low) + np.einsum(
            "ade,dbc->abce", dginv, gamma_low
        )

        if self.d3g is not None:
            d3g = self.d3g
            d2ginv = -(
                np.einsum("aed,efc,fb->abcd", dginv, dg, ginv)
                + np.einsum("ae,efcd,fb->abcd", ginv, d2g, ginv)
                + np.einsum("ae,efc,fbd->abcd", ginv, dg, dginv)
            )
            d2gamma_low = 0.5 * (
                d3g
                + np.einsum("dcbef->dbcef", d3g)
                - np.einsum("bcdef->dbcef", d3g)
            )
            self.d2gamma = (
                np.einsum("ad,dbcef->abcef", ginv, d2gamma_low)
                + np.einsum("ade,dbcf->abcef", dginv, dgamma_low)
                + np.einsum("adf,dbce->abcef", dginv, dgamma_low)
                + np.einsum("adef,dbc->abcef", d2ginv, gamma_low)
            )
        else:
            self.d2gamma = None

        gam, dgam = self.gamma, self.dgamma
        self.riem = (
            np.einsum("adbc->abcd", dgam)
            - np.einsum("acbd->abcd", dgam)
            + np.einsum("ace,edb->abcd", gam, gam)
            - np.einsum("ade,ecb->abcd", gam, gam)
        )
        self.ric = np.einsum("abad->bd", self.riem)
        self.scal = float(np.einsum("bd,bd->", ginv, self.ric))
        trp = -self.scal / (2.0 * (m - 1))
        self.trP = trp
        self.P = -(self.ric - (self.scal / (2.0 * (m - 1))) * g) / (m - 2)
        self.r4 = np.einsum("ta,azxy->xyzt", g, self.riem)
        self.weyl = self.r4 - _kulkarni(self.P, g)

        if self.d2gamma is not None:
            d2gam = self.d2gamma
            driem = (
                np.einsum("adbce->abcde", d2gam)
                - np.einsum("acbde->abcde", d2gam)
                + np.einsum("acfe,fdb->abcde", dgam, gam)
                + np.einsum("acf,fdbe->abcde", gam, dgam)
                - np.einsum("adfe,fcb->abcde", dgam, gam)
                - np.einsum("adf,fcbe->abcde", gam, dgam)
            )
            self.driem = driem
            self.dric = np.einsum("abade->bde", driem)
            self.dscal = np.einsum("bd,bde->e", ginv, self.dric) + np.einsum(
                "bde,bd->e", dginv, self.ric
            )
            self.dP = -(
                self.dric
                - np.einsum("e,bd->bde", self.dscal / (2.0 * (m - 1)), g)
                - (self.scal / (2.0 * (m - 1))) * dg
            ) / (m - 2)
            # covP[c,a,b] = (nabla_c P)(a, b)
            self.covP = (
                np.einsum("abc->cab", self.dP)
                - np.einsum("eca,eb->cab", gam, self.P)
                - np.einsum("ecb,ae->cab", gam, self.P)
            )
            self.cotton = self.covP - np.einsum("cab->acb", self.covP)
            self.dr4 = np.einsum("tae,azxy->xyzte", dg, self.riem) + np.einsum(
                "ta,azxye->xyzte", g, driem
            )
            self.dweyl = self.dr4 - _dkulkarni(self.P, self.dP, g, dg)
            covw = np.einsum("xyzte->exyzt", self.dweyl)
            covw = (
                covw
                - np.einsum("fex,fyzt->exyzt", gam.transpose((0, 2, 1)), self.weyl)
                - np.einsum("fey,xfzt->exyzt", gam.transpose((0, 2, 1)), self.weyl)
                - np.einsum("fez,xyft->exyzt", gam.transpose((0, 2, 1)), self.weyl)
                - np.einsum("fet,xyzf->exyzt", gam.transpose((0, 2, 1)), self.weyl)
            )
            self.covW = covw
        else:
            self.covP = None
            self.cotton = None
            self.covW = None

    # -- residuals ----------------------------------------------------------

    def schouten_residual(self):
        res = self.ric + (self.m - 2) * self.P + self.trP * self.g
        return float(np.max(np.abs(res))) / (1.0 + float(np.max(np.abs(self.ric))))

    def weyl_trace_residual(self):
        scale = 1.0 + float(np.max(np.abs(self.weyl)))
        worst = 0.0
        for spec in ("xz,xyzt->yt", "xt,xyzt->yz", "yt,xyzt->xz", "xy,xyzt->zt"):
            tr = np.einsum(spec, self.ginv, self.weyl)
            worst = max(worst, float(np.max(np.abs(tr))))
        return worst / scale

    def weyl_divergence(self):
        if self.covW is None:
            raise ChartError("needs metric jets to order >= 3")
        return np.einsum("et,exyzt->xyz", self.ginv, self.covW)

    def weyl_divergence_residual(self):
        """Residual against (3-m) Cotton, plus the empirically fitted factor."""
        div = self.weyl_divergence()
        cot = self.cotton
        scale = 1.0 + float(np.max(np.abs(div))) + float(np.max(np.abs(cot)))
        res = float(np.max(np.abs(div - (3.0 - self.m) * cot))) / scale
        denom = float(np.sum(cot * cot))
        fitted = float(np.sum(div * cot) / denom) if denom > 1e-18 else None
        return res, fitted


def _kulkarni(p, g):
    return (
        np.einsum("xz,yt->xyzt", p, g)
        + np.einsum("yt,xz->xyzt", p, g)
        - np.einsum("xt,yz->xyzt", p, g)
        - np.einsum("yz,xt->xyzt", p, g)
    )


def _dkulkarni(p, dp, g, dg):
    return (
        np.einsum("xze,yt->xyzte", dp, g)
        + np.einsum("xz,yte->xyzte", p, dg)
        + np.einsum("yte,xz->xyzte", dp, g)
        + np.einsum("yt,xze->xyzte", p, dg)
        - np.einsum("xte,yz->xyzte", dp, g)
        - np.einsum("xt,yze->xyzte", p, dg)
        - np.einsum("yze,xt->xyzte", dp, g)
        - np.einsum("yz,xte->xyzte", p, dg)
    )


def curvature_suite(chart, point, order=3) -> CurvatureData:
    return CurvatureData(chart, point, order)


def weyl_divergence_residual(chart, points, order=4):
    """Worst divergence-identity residual over sample points, plus fits."""
    worst = 0.0
    fits = []
    for pt in points:
        res, fit = CurvatureData(chart, pt, max(order, 3)).weyl_divergence_residual()
        worst = max(worst, res)
        if fit is not None:
            fits.append(fit)
    return worst, fits


def tractor_derivative(chart, field, point, v, order=3):
    """The four connection rows for the field's tractor at one point."""
    curv = CurvatureData(chart, point, max(order, 3))
    td = TractorData(curv, field, max(order, 3))
    return td.tractor_derivative_rows(np.asarray(v, float))


# ---------------------------------------------------------------------------
# conformal Killing analysis and adjoint-tractor components
# ---------------------------------------------------------------------------


class TractorData:
    """Adjoint-tractor components (gamma, -alpha, K, k) of a vector field."""

    def __init__(self, curv: CurvatureData, field: VectorFieldOnChart, order=3):
        self.curv = curv
        self.field = field
        m = curv.m
        sp = jet_space(m, order)
        kj = field.jets(curv.point, order)
        self.k = kj[:, 0].copy()
        p1, f1 = _deriv_index_arrays(sp, 1)
        self.dk = kj[:, p1] * f1
        p2, f2 = _deriv_index_arrays(sp, 2)
        self.d2k = kj[:, p2] * f2
        if order >= 3:
            p3, f3 = _deriv_index_arrays(sp, 3)
            self.d3k = kj[:, p3] * f3
        else:
            self.d3k = None
        self._build()

    def _build(self):
        c = self.curv
        g, dg, d2g, ginv, gam = c.g, c.dg, c.d2g, c.ginv, c.gamma
        m = c.m
        k, dk, d2k = self.k, self.dk, self.d2k

        self.lie_g = (
            np.einsum("abc,c->ab", dg, k)
            + np.einsum("cb,ca->ab", g, dk)
            + np.einsum("ac,cb->ab", g, dk)
        )
        div = float(np.trace(dk)) + float(np.einsum("aae,e->", gam, k))
        self.lam = 2.0 * div / m
        self.alpha = self.lam / 2.0
        self.killing_residual = float(
            np.max(np.abs(self.lie_g - self.lam * g))
        ) / (1.0 + float(np.max(np.abs(g))))

        # alpha derivatives (alpha = div(k)/m)
        gamtr = np.einsum("aae->e", gam)
        dgamtr = np.einsum("aaec->ec", c.dgamma)
        dalpha = (
            np.einsum("aac->c", d2k)
            + np.einsum("ec,e->c", dgamtr, k)
            + np.einsum("e,ec->c", gamtr, dk)
        ) / m
        self.dalpha = dalpha
        if self.d3k is not None and c.d2gamma is not None:
            d2gamtr = np.einsum("aaecd->ecd", c.d2gamma)
            self.d2alpha = (
                np.einsum("aacd->cd", self.d3k)
                + np.einsum("ecd,e->cd", d2gamtr, k)
                + np.einsum("ec,ed->cd", dgamtr, dk)
                + np.einsum("ed,ec->cd", dgamtr, dk)
                + np.einsum("e,ecd->cd", gamtr, d2k)
            ) / m
        else:
            self.d2alpha = None

        self.kflat = g @ k
        self.dkflat = np.einsum("bce,c->be", dg, k) + np.einsum("bc,ce->be", g, dk)
        dmat = np.einsum("bc->cb", self.dkflat) - self.dkflat  # D[c,b] = d_c kb - d_b kc
        self.K = 0.5 * np.einsum("ab,cb->ac", ginv, dmat)
        d2kflat = (
            np.einsum("bfce,f->bce", d2g, k)
            + np.einsum("bfc,fe->bce", dg, dk)
            + np.einsum("bfe,fc->bce", dg, dk)
            + np.einsum("bf,fce->bce", g, d2k)
        )
        ddmat = np.einsum("bce->cbe", d2kflat) - d2kflat  # d_e D[c,b]
        self.dK = 0.5 * (
            np.einsum("abe,cb->ace", c.dginv, dmat)
            + np.einsum("ab,cbe->ace", ginv, ddmat)
        )

        self.Pk = c.P @ k
        self.gamma1 = self.Pk - dalpha  # the tractor one-form
        self.dPk = np.einsum("bce,c->be", c.dP, k) + np.einsum("bc,ce->be", c.P, dk)
        if self.d2alpha is not None:
            self.dgamma1 = self.dPk - self.d2alpha
        else:
            self.dgamma1 = None

        self.nk = dk + np.einsum("abe,e->ab", gam, k)  # nabla_b k^a
        dnk = (
            d2k
            + np.einsum("abec,e->abc", c.dgamma, k)
            + np.einsum("abe,ec->abc", gam, dk)
        )
        self.n2k = (
            dnk
            + np.einsum("ace,eb->abc", gam, self.nk)
            - np.einsum("ecb,ae->abc", gam, self.nk)
        )

    def wedge(self, x, omega):
        """(x ^ omega)(u) = omega(u) x - f(x, u) omega_sharp, as a matrix."""
        c = self.curv
        sharp = c.ginv @ omega
        xflat = c.g @ x
        return np.outer(x, omega) - np.outer(sharp, xflat)

    def tractor_derivative_rows(self, v):
        """The four rows of the adjoint connection applied in direction v."""
        c = self.curv
        P = c.P
        Pv = P @ v
        # nabla_v gamma1_a = v^e (d_e gamma_a - Gamma^f_{ea} gamma_f)
        nabla_v_gamma = np.einsum("ae,e->a", self.dgamma1, v) - np.einsum(
            "fea,e,f->a", c.gamma, v, self.gamma1
        )
        row1 = nabla_v_gamma + self.alpha * Pv + np.einsum(
            "cb,b,ca->a", P, v, self.K
        )
        row2 = (
            -float(np.dot(self.gamma1, v))
            - float(np.dot(self.dalpha, v))
            + float(np.einsum("ab,a,b->", P, v, self.k))
        )
        nabla_v_K = (
            np.einsum("abe,e->ab", self.dK, v)
            + np.einsum("aef,e,fb->ab", c.gamma, v, self.K)
            - np.einsum("feb,e,af->ab", c.gamma, v, self.K)
        )
        row3 = self.wedge(v, self.gamma1) + nabla_v_K - self.wedge(self.k, Pv)
        row4 = -self.alpha * v - self.K @ v + self.nk @ v
        return row1, row2, row3, row4

    def tractor_residual(self, v):
        r1, r2, r3, r4 = self.tractor_derivative_rows(v)
        return max(
            float(np.max(np.abs(r1))),
            abs(r2),
            float(np.max(np.abs(r3))),
            float(np.max(np.abs(r4))),
        )


def conformal_killing_residual(chart, field, point, order=3):
    curv = CurvatureData(chart, point, max(order, 3))
    td = TractorData(curv, field, max(order, 3))
    return td.killing_residual, td.lam


def tractor_split(chart, field, point, tol=1e-8) -> TractorData:
    curv = CurvatureData(chart, point, 3)
    td = TractorData(curv, field, 3)
    if td.killing_residual > tol:
        raise NotConformalKilling(
            "field %s is not conformal Killing (residual %.3e)"
            % (field.label, td.killing_residual)
        )
    return td


def second_derivative_identity_residual(td: TractorData):
    """The parallel-tractor curvature identity for Killing fields."""
    c = td.curv
    m = c.m
    lhs = td.n2k  # [a, b, c] = (nabla_c nabla_b k)^a
    kP = np.zeros((m, m, m))
    uP = np.zeros((m, m, m))
    for cc in range(m):
        Pu = c.P[:, cc]
        kP[:, :, cc] = td.wedge(td.k, Pu)
        u = np.zeros(m)
        u[cc] = 1.0
        uP[:, :, cc] = td.wedge(u, c.P @ td.k)
    rhs = kP - uP
    scale = 1.0 + float(np.max(np.abs(lhs)))
    return float(np.max(np.abs(lhs - rhs))) / scale


def sparling_invariants(chart, k1, k2, points, order=3, tol_pre=1e-8):
    """The quaternionic Sparling scalars chi, beta_i and the third field.

    Checks the light-like/orthogonal/conformal-Killing preconditions at
    each point, evaluates all scalars, and reports their constancy.
    """
    chis, b1s, b2s, b3s, a3s = [], [], [], [], []
    k3vals = []
    for pt in points:
        curv = CurvatureData(chart, pt, order)
        t1 = TractorData(curv, k1, order)
        t2 = TractorData(curv, k2, order)
        for td, lbl in ((t1, k1.label), (t2, k2.label)):
            if td.killing_residual > tol_pre:
                raise NotConformalKilling("%s at %s" % (lbl, pt))
            if abs(float(td.k @ curv.g @ td.k)) > tol_pre:
                raise ChartError("field %s not light-like" % lbl)
        if abs(float(t1.k @ curv.g @ t2.k)) > tol_pre:
            raise ChartError("fields not orthogonal")
        chi = (
            float(t1.k @ curv.P @ t2.k)
            + t1.alpha * t2.alpha
            - 0.5 * float(np.dot(t1.k, t2.dalpha))
            - 0.5 * float(np.dot(t2.k, t1.dalpha))
        )
        chis.append(chi)
        k3 = t1.K @ t2.k - t2.alpha * t1.k
        k3vals.append(k3)
        lam3 = float(np.dot(t2.k, t1.dalpha)) - float(np.dot(t1.k, t2.dalpha))
        a3 = lam3 / 2.0
        a3s.append(a3)
        b1s.append(
            float(t1.k @ curv.P @ t1.k) + t1.alpha ** 2 - float(np.dot(t1.k, t1.dalpha))
        )
        b2s.append(
            float(t2.k @ curv.P @ t2.k) + t2.alpha ** 2 - float(np.dot(t2.k, t2.dalpha))
        )
        da3 = 0.5 * (
            np.einsum("ea,e->a", t2.dk, t1.dalpha)
            + np.einsum("e,ea->a", t2.k, t1.d2alpha)
            - np.einsum("ea,e->a", t1.dk, t2.dalpha)
            - np.einsum("e,ea->a", t1.k, t2.d2alpha)
        )
        b3s.append(float(k3 @ curv.P @ k3) + a3 ** 2 - float(np.dot(k3, da3)))

    def stats(vals):
        arr = np.array(vals)
        return {
            "mean": float(arr.mean()),
            "stddev": float(arr.std()),
        }

    return {
        "chi": stats(chis),
        "beta1": stats(b1s),
        "beta2": stats(b2s),
        "beta3": stats(b3s),
        "alpha3": stats(a3s),
        "k3_values": k3vals,
        "beta_product_residual": float(
            np.max(np.abs(np.array(b1s) * np.array(b2s) + np.array(b3s)))
        ),
    }


def felipe_conditions(chart, field, points, beta, tol=1e-8):
    """Eigenvector/normalization/complex-structure conditions of a tractor.

    ``beta`` is the conformally invariant constant of the field; the
    field is rescaled so that beta = -1 before checking.
    """
    if beta >= 0:
        raise ChartError("beta must be negative")
    knorm = field.scaled(1.0 / math.sqrt(-beta))
    report = {"eigen_k": 0.0, "eigen_gamma": 0.0, "normalization": 0.0, "complex_structure": 0.0}
    for pt in points:
        curv = CurvatureData(chart, pt, 3)
        td = TractorData(curv, knorm, 3)
        a = td.alpha
        r_k = np.max(np.abs(td.K @ td.k - a * td.k))
        gsharp = curv.ginv @ td.gamma1
        r_g = np.max(np.abs(td.K @ (-gsharp) - a * (-gsharp)))
        r_n = abs(float(np.dot(td.gamma1, td.k)) + a * a + 1.0)
        # complement of span(k, gamma_sharp) w.r.t. f-orthogonality
        rows = np.vstack([curv.g @ td.k, td.gamma1])
        _, _, vt = np.linalg.svd(rows)
        h_basis = vt[2:]
        ksq = td.K @ td.K + np.eye(curv.m)
        r_c = max(
            (float(np.max(np.abs(ksq @ u))) for u in h_basis), default=0.0
        )
        report["eigen_k"] = max(report["eigen_k"], float(r_k))
        report["eigen_gamma"] = max(report["eigen_gamma"], float(r_g))
        report["normalization"] = max(report["normalization"], float(r_n))
        report["complex_structure"] = max(report["complex_structure"], float(r_c))
    report["pass"] = all(v <= tol for k, v in report.items() if k != "pass")
    return report


def trace_contraction_check(chart, field, point, order=3):
    """Frame traces of the curvature against the derivative of a Killing field."""
    curv = CurvatureData(chart, point, order)
    td = TractorData(curv, field, order)
    w_tr = np.einsum("xyuv,xb,by->uv", curv.weyl, td.nk, curv.ginv)
    c_tr = np.einsum("xyu,xb,by->u", curv.cotton, td.nk, curv.ginv)
    k_w = np.einsum("xyzt,x->yzt", curv.weyl, td.k)
    k_c1 = np.einsum("xyz,x->yz", curv.cotton, td.k)
    k_c3 = np.einsum("xyz,z->xy", curv.cotton, td.k)
    scale = 1.0 + float(np.max(np.abs(curv.weyl))) + float(np.max(np.abs(curv.cotton)))
    return {
        "weyl_trace": float(np.max(np.abs(w_tr))) / scale,
        "cotton_trace": float(np.max(np.abs(c_tr))) / scale,
        "k_into_weyl": float(np.max(np.abs(k_w))) / scale,
        "k_into_cotton": max(
            float(np.max(np.abs(k_c1))), float(np.max(np.abs(k_c3)))
        )
        / scale,
        "alpha": td.alpha,
    }


def pseudo_orthonormal_frame(g, pivot_tol=1e-8):
    """Gram-Schmidt frame with signs; raises on degenerate pivots."""
    m = g.shape[0]
    vecs = [np.eye(m)[:, a] for a in range(m)]
    frame = []
    eps = []
    for _ in range(m):
        best, best_val = None, 0.0
        for v in vecs:
            val = abs(float(v @ g @ v))
            if val > best_val:
                best, best_val = v, val
        if best is None or best_val <= pivot_tol:
            raise ChartError("degenerate pivot in frame construction")
        nrm = float(best @ g @ best)
        e = best / math.sqrt(abs(nrm))
        s = 1.0 if nrm > 0 else -1.0
        frame.append(e)
        eps.append(s)
        vecs = [
            v - (float(v @ g @ e) / s) * e
            for v in vecs
            if v is not best
        ]
    return np.array(frame).T, np.array(eps)


# ---------------------------------------------------------------------------
# standard charts
# ---------------------------------------------------------------------------


def flat_chart(dim, signature=None):
    p = dim if signature is None else signature[0]
    diag = [1.0] * p + [-1.0] * (dim - p)

    def metric(xs):
        return [
            [diag[a] if a == b else 0.0 for b in range(dim)] for a in range(dim)
        ]

    return MetricChart("flat%dd" % dim, dim, metric, (p, dim - p))


def sphere_chart(m):
    """Unit round sphere in stereographic coordinates."""

    def metric(xs):
        r2 = xs[0] * xs[0]
        for x in xs[1:]:
            r2 = r2 + x * x
        conf = (r2 + 1.0).reciprocal()
        factor = 4.0 * conf * conf
        return [
            [factor if a == b else 0.0 for b in range(m)] for a in range(m)
        ]

    return MetricChart("sphere%dd" % m, m, metric, (m, 0), radius=0.8)


def random_polynomial_chart(dim, seed, signature=None, scale=0.05, radius=0.4):
    """Flat metric plus a random quartic polynomial perturbation."""
    rng = np.random.default_rng(seed)
    p = dim if signature is None else signature[0]
    diag = [1.0] * p + [-1.0] * (dim - p)
    n_terms = 6
    coefs = {}
    for a in range(dim):
        for b in range(a, dim):
            terms = []
            for _ in range(n_terms):
                mono = rng.integers(0, dim, size=int(rng.integers(1, 5)))
                cv = scale * float(rng.uniform(-1, 1))
                terms.append((list(mono), cv))
            coefs[(a, b)] = terms

    def metric(xs):
        rows = [[None] * dim for _ in range(dim)]
        for a in range(dim):
            for b in range(a, dim):
                val = diag[a] * 1.0 if a == b else 0.0
                acc = None
                for mono, cv in coefs[(a, b)]:
                    t = None
                    for v in mono:
                        t = xs[v] if t is None else t * xs[v]
                    t = t * cv
                    acc = t if acc is None else acc + t
                entry = acc + val if acc is not None else val
                rows[a][b] = entry
                rows[b][a] = entry
        return rows

    return MetricChart(
        "randpoly%dd-s%d" % (dim, seed), dim, metric, (p, dim - p), radius=radius
    )


def random_conf_factor(dim, seed, scale=0.1):
    rng = np.random.default_rng(seed + 1000)
    lin = rng.uniform(-1, 1, dim) * scale
    quad = rng.uniform(-1, 1, (dim, dim)) * scale * 0.5

    def phi(xs):
        acc = None
        for a in range(dim):
            t = xs[a] * float(lin[a])
            acc = t if acc is None else acc + t
            for b in range(dim):
                acc = acc + xs[a] * xs[b] * float(quad[a, b])
        return acc

    return phi


def weyl_conformal_covariance_residual(chart, point, conf_fn, order=3):
    """| W(e^{2phi} g) - e^{2phi} W(g) | at the point, normalized."""
    base = CurvatureData(chart, point, order)
    resc = CurvatureData(chart.rescaled(conf_fn), point, order)
    xs = jet_variables(point, 1)
    factor = math.exp(2.0 * conf_fn(xs).value)
    diff = resc.weyl - factor * base.weyl
    return float(np.max(np.abs(diff))) / (1.0 + float(np.max(np.abs(base.weyl))))


def frame_independence_residual(chart, point, seed=0, order=3):
    """Curvature scalars agree under a random linear change of coordinates."""
    rng = np.random.default_rng(seed)
    m = chart.dim
    A = np.eye(m) + 0.2 * rng.uniform(-1, 1, (m, m))

    def metric(xs):
        ys = [None] * m
        for a in range(m):
            acc = None
            for b in range(m):
                t = xs[b] * float(A[a, b])
                acc = t if acc is None else acc + t
            ys[a] = acc
        rows = chart.metric_fn(ys)
        out = [[None] * m for _ in range(m)]
        for a in range(m):
            for b in range(m):
                acc = None
                for c in range(m):
                    for d in range(m):
                        coef = float(A[c, a] * A[d, b])
                        if coef:
                            t = rows[c][d] * coef
                            acc = t if acc is None else acc + t
                out[a][b] = acc
        return out

    pulled = MetricChart(chart.name + "+lin", m, metric, chart.signature)
    pt2 = np.linalg.solve(A, np.asarray(point, float))
    c1 = CurvatureData(chart, point, order)
    c2 = CurvatureData(pulled, pt2, order)
    res = abs(c1.scal - c2.scal) / (1.0 + abs(c1.scal))

    def weyl_norm2(c):
        up = np.einsum(
            "xa,yb,zc,td,abcd->xyzt", c.ginv, c.ginv, c.ginv, c.ginv, c.weyl
        )
        return float(np.einsum("xyzt,xyzt->", up, c.weyl))

    w1, w2 = weyl_norm2(c1), weyl_norm2(c2)
    return max(res, abs(w1 - w2) / (1.0 + abs(w1)))
