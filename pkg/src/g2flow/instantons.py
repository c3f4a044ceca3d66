"""Invariant instanton families on the cone over S^3 x S^3 profiles.

A diagonal invariant connection is described by six profile functions,
a_i^+ = A_i f_i^+ T_i and a_i^- = B_i f_i^- T_i, subject to the six
coupled equations (cyclic (i, j, k))

    df_i^+/dt + F_i f_i^+ = f_j^- f_k^- - f_j^+ f_k^+
    df_i^-/dt + G_i f_i^- = f_j^- f_k^+ + f_j^+ f_k^-

with the coefficient functions of the underlying structure.  This module
provides the explicit one-parameter family theta_x1 and its limit
theta_zero (built from the canonical normalization E, Q below), the
two-parameter extension family theta_y0, flat and abelian references, and
the singular initial value problems that generate solutions near t = 0
on both invariant bundles.

Canonical normalization: E(t) = t exp(-int_0^t phi_1) solves E'/E = -F_1
and Q(t) = int_0^t E.  On every symmetric structure

    theta_x1:   x(t) = x1 E / (1 + x1 Q),      f_i^+ = x, f_i^- = 0
    theta_zero: x(t) = E / Q,                  the x1 -> infinity limit

both solving the scalar reduction x' = (1/t - phi_1) x - x^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ._series import PowerSeries, ps_var
from .algebra import ConnectionCoeffs
from .singular_ivp import (EventSpec, SingularIVP, Trajectory, blowup_event,
                           integrate, malgrange_check, series_bootstrap,
                           solve_boundary)
from .structures import (CYC0, SeriesR, StructureData, _horner,
                         coefficient_functions)

BLOWUP_THRESHOLD = 1e8
SOLUTION_SERIES_CUTOFF = 1e-3


@dataclass
class InstantonSolution:
    """One member of a solution family.

    f6(t) returns the six profile values (f_1^+, f_2^+, f_3^+, f_1^-,
    f_2^-, f_3^-); for the abelian family the slots hold the connection
    coefficients themselves (a_i^+ multiplies T_i directly, without the
    A_i factor).  valid is the (lo, hi] interval of definition.
    """

    family: str
    params: dict
    bundle: str
    structure: object
    f6: object = None
    trajectory: object = None
    valid: tuple = (0.0, math.inf)
    extras: dict = field(default_factory=dict)

    def coefficients(self, t):
        if self.f6 is None:
            raise ValueError(
                "family %r stores no profile functions" % self.family)
        lo, hi = self.valid
        if t < lo or t > hi * (1 + 1e-9):
            raise ValueError("t=%g outside validity (%g, %g]" % (t, lo, hi))
        return np.asarray(self.f6(t), dtype=float)

    def connection(self, t):
        return connection_at(self, t)


def connection_at(sol, t):
    """ConnectionCoeffs of a family member at time t."""
    if sol.family.startswith("flat"):
        sign = sol.params.get("sign", 1.0)
        return ConnectionCoeffs.from_diagonal((1.0, 1.0, 1.0),
                                              (sign, sign, sign))
    f = sol.coefficients(t)
    if sol.family == "abelian":
        return ConnectionCoeffs.from_diagonal(tuple(f[:3]), tuple(f[3:]))
    s = sol.structure
    if s is None:
        raise ValueError("family %r carries no structure" % sol.family)
    ap = tuple(s.A[i](t) * f[i] for i in range(3))
    am = tuple(s.B[i](t) * f[3 + i] for i in range(3))
    return ConnectionCoeffs.from_diagonal(ap, am)


# ---------------------------------------------------------------------------
# Canonical normalization E, Q


def _eq_data(s, t_need):
    """Dense (E, Q) on [0, horizon], rebuilt lazily when the horizon grows."""
    holder = s._cache.get("EQ")
    t_need = min(float(t_need), s.t_max)
    if holder is not None and holder["horizon"] >= t_need:
        return holder
    cf = coefficient_functions(s)
    phi1 = cf.phi[0]
    horizon = min(s.t_max, max(1.0, 1.25 * t_need))

    def rhs(t, y):
        return [phi1(t) if t > 0 else 0.0,
                t * math.exp(-y[0])]

    sol = solve_ivp(rhs, (0.0, horizon), [0.0, 0.0], method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True)
    if not sol.success:
        raise RuntimeError("quadrature for (E, Q) failed: %s" % sol.message)
    dense = sol.sol

    phi_ps = cf.phi_series[0].as_power_series()
    E_ps = ps_var(phi_ps.order + 1) * (-(phi_ps.integ())).exp()
    Q_ps = E_ps.integ()

    def E(t):
        if t <= 0.0:
            return 0.0
        return t * math.exp(-float(dense(t)[0]))

    def Q(t):
        if t <= 0.0:
            return 0.0
        return float(dense(t)[1])

    holder = {"horizon": horizon, "E": E, "Q": Q,
              "E_ps": E_ps, "Q_ps": Q_ps}
    s._cache["EQ"] = holder
    return holder


def _require_symmetric(s):
    if not s.symmetric:
        raise ValueError("family needs a symmetric structure (equal A_i, "
                         "equal B_i); %r is not" % s.label)


def _theta_core(s, x_eval, dx_eval, A1x_ps, family, params):
    def f6(t):
        x = x_eval(t)
        return np.array([x, x, x, 0.0, 0.0, 0.0])

    A_ps = s.A_series[0].as_power_series()

    def A1x(t):
        if t < SOLUTION_SERIES_CUTOFF:
            return _horner(list(A1x_ps), t)
        return s.A[0](t) * x_eval(t)

    def dA1x(t):
        if t < SOLUTION_SERIES_CUTOFF:
            return _horner(list(A1x_ps.deriv()), t)
        return s.dA[0](t) * x_eval(t) + s.A[0](t) * dx_eval(t)

    extras = {"x": x_eval, "dx": dx_eval, "A1x": A1x, "dA1x": dA1x,
              "A1x_series": A1x_ps, "A_series": A_ps}
    return InstantonSolution(family=family, params=params, bundle="P1"
                             if family == "theta_x1" else "Pid",
                             structure=s, f6=f6, valid=(0.0, s.t_max),
                             extras=extras)


def theta_x1(s, x1):
    """The explicit family x = x1 E/(1 + x1 Q) on a symmetric structure.

    x1 >= 0 is the t^2 coefficient of 2 A_1 x at the origin; x1 = 0 is
    the product connection.  Lives on the bundle framed by f_i^+ smooth.
    """
    _require_symmetric(s)
    x1 = float(x1)
    if x1 < 0:
        raise ValueError("x1 must be >= 0")
    cf = coefficient_functions(s)
    eq = _eq_data(s, min(s.t_max, 12.0))
    x_ps = (eq["E_ps"] * x1) / (eq["Q_ps"] * x1 + 1.0)

    def x_eval(t):
        if t < 0:
            raise ValueError("t must be >= 0")
        if t < SOLUTION_SERIES_CUTOFF:
            return _horner(list(x_ps), t)
        eq = _eq_data(s, t)
        return x1 * eq["E"](t) / (1.0 + x1 * eq["Q"](t))

    def dx_eval(t):
        if t <= 0:
            return x1
        if t < SOLUTION_SERIES_CUTOFF:
            return _horner(list(x_ps.deriv()), t)
        x = x_eval(t)
        return cf.scalar_F(t) * x - x * x

    A1x_ps = s.A_series[0].as_power_series() * x_ps
    return _theta_core(s, x_eval, dx_eval, A1x_ps, "theta_x1", {"x1": x1})


def theta_zero(s):
    """The x1 -> infinity member x = E/Q; A_1 x -> 1 at the origin.

    The profile diverges like 2/t at t = 0, matching the framing of the
    second invariant bundle.
    """
    _require_symmetric(s)
    cf = coefficient_functions(s)
    eq = _eq_data(s, min(s.t_max, 12.0))
    num_ps = eq["E_ps"].shift_down(1)
    den_ps = eq["Q_ps"].shift_down(2)

    def x_eval(t):
        if t <= 0:
            raise ValueError("theta_zero profile diverges at t = 0")
        if t < SOLUTION_SERIES_CUTOFF:
            return _horner(list(num_ps), t) / (_horner(list(den_ps), t) * t)
        eq = _eq_data(s, t)
        return eq["E"](t) / eq["Q"](t)

    def dx_eval(t):
        if t <= 0:
            raise ValueError("theta_zero profile diverges at t = 0")
        x = x_eval(t)
        return cf.scalar_F(t) * x - x * x

    A1x_ps = (s.A_series[0].as_power_series()
              * eq["E_ps"]).shift_down(2) / den_ps
    return _theta_core(s, x_eval, dx_eval, A1x_ps, "theta_zero", {})


# ---------------------------------------------------------------------------
# Scalar reductions of the symmetric case


def su23_rhs(s):
    """RHS of the scalar pair x' = (1/t - phi) x + y^2 - x^2,
    y' = -(4/t + gamma) y + 2 x y on a symmetric structure."""
    _require_symmetric(s)
    cf = coefficient_functions(s)
    phi, gamma = cf.phi[0], cf.gamma[0]

    def rhs(t, z):
        x, y = z[0], z[1]
        return [(1.0 / t - phi(t)) * x + y * y - x * x,
                -(4.0 / t + gamma(t)) * y + 2.0 * x * y]

    return rhs


def su23_rhs_pm(s):
    """Same pair in the bounded coordinates (A_1 x, B_1 y)."""
    _require_symmetric(s)
    A1, B1 = s.A[0], s.B[0]

    def rhs(t, z):
        a, b = A1(t), B1(t)
        xp, xm = z[0], z[1]
        rat = a / (b * b)
        return [(xp / a) * (1.0 - a * rat - xp) + rat * xm * xm,
                2.0 * xm * (xp - 1.0) / a]

    return rhs


def su23_p1_ivp(s, x1):
    """Reduced singular problem for x = x1 t + t^3 u, y = t^2 v."""
    _require_symmetric(s)
    cf = coefficient_functions(s)
    phi, gamma, phi_hat = cf.phi[0], cf.gamma[0], cf.phi_hat[0]
    p1 = cf.phi1[0]
    x1 = float(x1)
    u0 = -0.5 * (x1 * x1 + p1 * x1)

    def M_minus1(y):
        u, v = y[0], y[1]
        return [-2.0 * u - x1 * x1 - p1 * x1, -6.0 * v]

    def M(t, y):
        u, v = y[0], y[1]
        t3 = t * t * t
        return [-x1 * phi_hat(t) - phi(t) * u + t * (v * v - 2.0 * x1 * u)
                - t3 * u * u,
                v * (-gamma(t) + 2.0 * x1 * t + 2.0 * t3 * u)]

    def jac(y):
        return np.diag([-2.0, -6.0])

    return SingularIVP(2, M_minus1, M, [u0, 0.0], label="su23-p1(x1=%g)" % x1,
                       jacobian=jac, meta={"x1": x1})


def su23_pid_ivp(s, y0):
    """Reduced singular problem for x = 2/t + t u, y = y0 + t^2 v."""
    _require_symmetric(s)
    cf = coefficient_functions(s)
    phi, gamma = cf.phi[0], cf.gamma[0]
    phi_hat, gamma_hat = cf.phi_hat[0], cf.gamma_hat[0]
    p1, g1 = cf.phi1[0], cf.gamma1[0]
    y0 = float(y0)
    u0 = 0.25 * (y0 * y0 - 2.0 * p1)
    v0 = y0 * u0 - 0.5 * y0 * g1

    def M_minus1(y):
        u, v = y[0], y[1]
        return [-4.0 * u + y0 * y0 - 2.0 * p1,
                -2.0 * v + 2.0 * y0 * u - y0 * g1]

    def M(t, y):
        u, v = y[0], y[1]
        t3 = t * t * t
        return [-2.0 * phi_hat(t) - phi(t) * u + 2.0 * y0 * t * v
                + t3 * v * v - t * u * u,
                -y0 * gamma_hat(t) - gamma(t) * v + 2.0 * t * u * v]

    def jac(y):
        return np.array([[-4.0, 0.0], [2.0 * y0, -2.0]])

    return SingularIVP(2, M_minus1, M, [u0, v0],
                       label="su23-pid(y0=%g)" % y0,
                       jacobian=jac, meta={"y0": y0})


def theta_y0(s, y0, t_end=10.5, eps=1e-2, order=10, tol=1e-13,
             region_events="auto"):
    """Two-parameter extension member with f_i^- -> y0 at the origin.

    Bootstraps the reduced (u, v) problem on [0, eps], then continues the
    bounded pair (A_1 x, B_1 y) adaptively with blow-up (and, strictly
    inside the proven region 0 < y0 < 1/b0, region-exit) events.  The
    trajectory attribute holds the bounded-coordinate continuation.
    """
    _require_symmetric(s)
    y0 = float(y0)
    ivp = su23_pid_ivp(s, y0)
    rep = malgrange_check(ivp)
    series = series_bootstrap(ivp, order=order, check=rep)
    upoly = series[0].coefficients
    vpoly = series[1].coefficients
    A1, B1 = s.A[0], s.B[0]
    hi = min(float(t_end), s.t_max)
    if not eps < hi:
        raise ValueError("need eps < t_end <= t_max")

    def x_small(t):
        return 2.0 / t + t * _horner(upoly, t)

    def y_small(t):
        return y0 + t * t * _horner(vpoly, t)

    state0 = [A1(eps) * x_small(eps), B1(eps) * y_small(eps)]
    events = [blowup_event(BLOWUP_THRESHOLD)]
    watch_region = (region_events is True
                    or (region_events == "auto" and 0.0 < y0 < 1.0 / s.b0))
    if watch_region:
        events += [
            EventSpec("region-exit", lambda t, z: z[0]),
            EventSpec("region-exit", lambda t, z: 1.0 - z[0]),
            EventSpec("region-exit", lambda t, z: z[1]),
            EventSpec("region-exit", lambda t, z: 1.0 - z[1]),
        ]
    traj = integrate(su23_rhs_pm(s), (eps, hi), state0, tol=tol,
                     events=events, label="theta_y0(y0=%g)" % y0)
    blow = traj.event_times("blow-up")
    hi_valid = min(blow) if blow else float(traj.t[-1])

    def f6(t):
        if t <= 0:
            raise ValueError("profile diverges at t = 0")
        if t <= eps:
            x, y = x_small(t), y_small(t)
        else:
            z = traj(t)
            x, y = z[0] / A1(t), z[1] / B1(t)
        return np.array([x, x, x, y, y, y])

    params = {"y0": y0}
    if abs(y0) > 1.0 / s.b0 + 1e-12:
        params["outside_proven_family"] = True
    extras = {"ivp": ivp, "check": rep, "u_series": series[0],
              "v_series": series[1], "eps": eps,
              "pm": lambda t: (np.array([A1(t) * x_small(t),
                                         B1(t) * y_small(t)])
                               if t <= eps else traj(t)),
              "watched_region": watch_region}
    return InstantonSolution(family="theta_y0", params=params, bundle="Pid",
                             structure=s, f6=f6, trajectory=traj,
                             valid=(0.0, hi_valid), extras=extras)


# ---------------------------------------------------------------------------
# Six-dimensional singular problems on both bundles


def su22_rhs(s):
    """RHS of the full six-profile system on any structure."""
    cf = coefficient_functions(s)

    def rhs(t, f):
        out = np.empty(6)
        for i, j, k in CYC0:
            out[i] = (-cf.F[i](t) * f[i] + f[3 + j] * f[3 + k]
                      - f[j] * f[k])
            out[3 + i] = (-cf.G[i](t) * f[3 + i] + f[3 + j] * f[k]
                          + f[j] * f[3 + k])
        return out

    return rhs


def p1_ivp(s, f1=(1.0, 1.0, 1.0)):
    """Singular problem for f_i^+ = f_{i,1} t + t^3 u_i, f_i^- = t^2 v_i.

    The leading data f1 = (f_{1,1}, f_{2,1}, f_{3,1}) is free; the next
    coefficients are forced.  meta["boundary_variants"] records the
    engine value of u_i(0) next to the two printed candidate formulas
    (they differ in whether the quadratic term is halved) and which of
    them the engine confirms.
    """
    cf = coefficient_functions(s)
    f1 = tuple(float(x) for x in f1)
    p1v, phi, gamma = cf.phi1, cf.phi, cf.gamma
    phi_hat = cf.phi_hat

    def M_minus1(y):
        out = [None] * 6
        for i, j, k in CYC0:
            out[i] = -2.0 * y[i] - p1v[i] * f1[i] - f1[j] * f1[k]
            out[3 + i] = -6.0 * y[3 + i]
        return out

    def M(t, y):
        t3 = t * t * t
        out = [None] * 6
        for i, j, k in CYC0:
            u_i, u_j, u_k = y[i], y[j], y[k]
            v_j, v_k = y[3 + j], y[3 + k]
            out[i] = (-f1[i] * phi_hat[i](t) - phi[i](t) * u_i
                      + t * (v_j * v_k - f1[j] * u_k - f1[k] * u_j)
                      - t3 * u_j * u_k)
            out[3 + i] = (-gamma[i](t) * y[3 + i]
                          + t * (v_j * f1[k] + f1[j] * v_k)
                          + t3 * (v_j * u_k + u_j * v_k))
        return out

    def jac(y):
        return np.diag([-2.0] * 3 + [-6.0] * 3)

    y0 = solve_boundary(M_minus1, np.zeros(6), jacobian=jac)
    engine = tuple(y0[:3])
    a3 = s.a3
    statement, proof = [], []
    for i, j, k in CYC0:
        lin = (1.0 / (4.0 * s.b0 ** 2) + 2.0 * (a3[j] + a3[k])) * f1[i]
        statement.append(-lin - f1[j] * f1[k])
        proof.append(-lin - 0.5 * f1[j] * f1[k])
    d_st = max(abs(e - v) for e, v in zip(engine, statement))
    d_pr = max(abs(e - v) for e, v in zip(engine, proof))
    tol = 1e-10 * max(1.0, max(abs(v) for v in engine))
    match = {(True, True): "both", (True, False): "statement",
             (False, True): "proof", (False, False): "neither"}[
                 (d_st <= tol, d_pr <= tol)]
    meta = {"f1": f1,
            "boundary_variants": {"engine": engine,
                                  "statement": tuple(statement),
                                  "proof": tuple(proof),
                                  "match": match}}
    return SingularIVP(6, M_minus1, M, y0, label="p1", jacobian=jac,
                       meta=meta)


@dataclass
class PidBoundaryData:
    b0_minus: float
    b2_plus: float
    u1_0: float
    u2_0: float
    u3_0: float
    v0: tuple


def pid_ivp(s, b0_minus, u2_0=0.0, u3_0=0.0):
    """Singular problem for f_i^+ = 2/t + beta_i t + t^3 u_i,
    f_i^- = b0_minus + t^2 v_i.

    The t^{-3} balance forces b2_plus = (b0_minus^2 - 1/b0^2)/4 and
    beta_i = b2_plus - 4 a_{i,3}; v_i(0) is then determined linearly and
    u_i(0) only through the sum, leaving (u2_0, u3_0) free.  When the
    structure makes the three u-row constants inconsistent the returned
    problem fails its solvability gate with a nonzero residual rather
    than being repaired here.
    """
    cf = coefficient_functions(s)
    b0m = float(b0_minus)
    b2p = 0.25 * (b0m * b0m - 1.0 / s.b0 ** 2)
    a3 = s.a3
    beta = tuple(b2p - 4.0 * a3[i] for i in range(3))
    p1v, p3v, g1v = cf.phi1, cf.phi3, cf.gamma1
    K = [None] * 3
    K4 = [None] * 3
    for i, j, k in CYC0:
        K[i] = -2.0 * p3v[i] - beta[i] * p1v[i] - beta[j] * beta[k]
        K4[i] = b0m * (beta[j] + beta[k] - g1v[i])

    Jv = 2.0 * np.ones((3, 3)) - 8.0 * np.eye(3)
    v0 = np.linalg.solve(Jv, -np.asarray(K4))
    sum_u = []
    for i, j, k in CYC0:
        sum_u.append(0.5 * (b0m * (v0[j] + v0[k]) + K[i]))
    u1 = float(np.mean(sum_u)) - u2_0 - u3_0
    y0 = np.array([u1, u2_0, u3_0, v0[0], v0[1], v0[2]])

    phi, gamma = cf.phi, cf.gamma
    phi3 = cf.phi3
    dphi, gamma_hat = cf.dphi, cf.gamma_hat

    def M_minus1(y):
        out = [None] * 6
        su = y[0] + y[1] + y[2]
        for i, j, k in CYC0:
            out[i] = -2.0 * su + b0m * (y[3 + j] + y[3 + k]) + K[i]
            out[3 + i] = (-6.0 * y[3 + i] + 2.0 * y[3 + j]
                          + 2.0 * y[3 + k] + K4[i])
        return out

    def M(t, y):
        t3 = t * t * t
        out = [None] * 6
        for i, j, k in CYC0:
            u_i, u_j, u_k = y[i], y[j], y[k]
            v_i, v_j, v_k = y[3 + i], y[3 + j], y[3 + k]
            out[i] = (t * (v_j * v_k - beta[j] * u_k - beta[k] * u_j
                           - 2.0 * dphi[i](t) - beta[i] * phi3[i])
                      - phi[i](t) * u_i - beta[i] * t3 * dphi[i](t)
                      - t3 * u_j * u_k)
            out[3 + i] = (-b0m * gamma_hat[i](t) - gamma[i](t) * v_i
                          + t * (b0m * (u_j + u_k) + beta[k] * v_j
                                 + beta[j] * v_k)
                          + t3 * (v_j * u_k + u_j * v_k))
        return out

    def jac(y):
        J = np.zeros((6, 6))
        J[:3, :3] = -2.0
        J[:3, 3:] = b0m * (np.ones((3, 3)) - np.eye(3))
        J[3:, 3:] = Jv
        return J

    boundary = PidBoundaryData(b0m, b2p, float(y0[0]), float(u2_0),
                               float(u3_0), tuple(float(v) for v in v0))
    meta = {"boundary": boundary, "beta": beta,
            "v0_formula_symmetric": b0m * (b2p - s.b2 / s.b0)}
    return SingularIVP(6, M_minus1, M, y0, label="pid", jacobian=jac,
                       meta=meta)


# ---------------------------------------------------------------------------
# Flat and abelian references


def flat_pid(s, sign=1):
    """Flat product connection f_i^+ = 1/A_i, f_i^- = sign/B_i."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")

    def f6(t):
        return np.array([1.0 / s.A[0](t), 1.0 / s.A[1](t), 1.0 / s.A[2](t),
                         sign / s.B[0](t), sign / s.B[1](t),
                         sign / s.B[2](t)])

    fam = "flat_plus" if sign == 1 else "flat_minus"
    return InstantonSolution(family=fam, params={"sign": float(sign)},
                             bundle="Pid", structure=s, f6=f6,
                             valid=(0.0, s.t_max))


def abelian_connection(s, t0, aplus_t0, aminus_t0=(0.0, 0.0, 0.0),
                       t_lo=1e-6):
    """Diagonal abelian connection fixed by its value at t0.

    a_i^+(t) = a_i^+(t0) (t/t0)^2 exp(-int_{t0}^t q_i) and the raw
    companion branch a_i^-(t) = a_i^-(t0) (t0/t)^4 exp(-int_{t0}^t h_i),
    with q_i, h_i the regular parts of the abelian decay rates.  The six
    slots of f6 hold the connection coefficients themselves.
    """
    t0 = float(t0)
    if not 0.0 < t0 <= s.t_max:
        raise ValueError("t0 must lie in (0, t_max]")
    cf = coefficient_functions(s)
    rates = list(cf.a_plus_rate) + list(cf.a_minus_rate)

    def rhs(t, y):
        return [r(t) for r in rates]

    hi = s.t_max
    sol_up = solve_ivp(rhs, (t0, hi), np.zeros(6), method="DOP853",
                       rtol=3e-13, atol=1e-15, dense_output=True)
    sol_dn = solve_ivp(rhs, (t0, t_lo), np.zeros(6), method="DOP853",
                       rtol=3e-13, atol=1e-15, dense_output=True)
    if not (sol_up.success and sol_dn.success):
        raise RuntimeError("abelian rate quadrature failed")

    def ints(t):
        return (sol_up.sol(t) if t >= t0 else sol_dn.sol(t))

    ap0 = tuple(float(x) for x in aplus_t0)
    am0 = tuple(float(x) for x in aminus_t0)

    def f6(t):
        iv = ints(t)
        sc2 = (t / t0) ** 2
        sc4 = (t0 / t) ** 4
        out = np.empty(6)
        for i in range(3):
            out[i] = ap0[i] * sc2 * math.exp(-float(iv[i]))
            out[3 + i] = am0[i] * sc4 * math.exp(-float(iv[3 + i]))
        return out

    bundle = "P1" if all(v == 0.0 for v in am0) else "none"
    return InstantonSolution(
        family="abelian", params={"t0": t0, "aplus_t0": ap0,
                                  "aminus_t0": am0},
        bundle=bundle, structure=s, f6=f6, valid=(t_lo, hi),
        extras={"raw_minus_branch": any(v != 0.0 for v in am0)})


# ---------------------------------------------------------------------------
# Residuals and export


def _stencil_nodes(t, h, lo, hi):
    """Derivative stencil at t staying inside (lo, hi].

    Five-point central away from the edges, one-sided four-point next to
    them (avoids evaluating at or below lo, in particular at t <= 0).
    Returns offsets and weights with dw = sum(w*f(t+o*h)) / h.
    """
    slack = hi * (1 + 1e-9)
    if t - 2 * h > lo and t + 2 * h <= slack:
        return (-2, -1, 1, 2), (1 / 12.0, -8 / 12.0, 8 / 12.0, -1 / 12.0)
    if t - 2 * h <= lo and t + 3 * h <= slack:
        return (0, 1, 2, 3), (-11 / 6.0, 3.0, -3 / 2.0, 1 / 3.0)
    if t + 2 * h > slack and t - 3 * h > lo:
        return (0, -1, -2, -3), (11 / 6.0, -3.0, 3 / 2.0, -1 / 3.0)
    raise ValueError("no stencil fits the validity interval at t=%g" % t)


def residual_pointwise(s, sol, t, h_rel=1e-5):
    """Sup norm of the six-equation defect at t.

    Derivatives are estimated by five-point stencils on the bounded
    products A_i f_i^+ and B_i f_i^-, then converted back with the exact
    profile derivatives; this keeps the estimator usable down to small t
    where the raw profiles grow like 1/t.
    """
    cf = coefficient_functions(s)
    h = h_rel * max(t, 1.0)
    lo, hi = sol.valid
    offs, wts = _stencil_nodes(t, h, lo, hi)
    ts = [t + o * h for o in offs]
    fvals = [sol.coefficients(x) for x in ts]
    w = np.empty((6, len(ts)))
    for m, (x, f) in enumerate(zip(ts, fvals)):
        for i in range(3):
            w[i, m] = s.A[i](x) * f[i]
            w[3 + i, m] = s.B[i](x) * f[3 + i]
    dw = w.dot(wts) / h
    f = sol.coefficients(t)
    df = np.empty(6)
    for i in range(3):
        df[i] = (dw[i] - s.dA[i](t) * f[i]) / s.A[i](t)
        df[3 + i] = (dw[3 + i] - s.dB[i](t) * f[3 + i]) / s.B[i](t)
    r = np.empty(6)
    for i, j, k in CYC0:
        r[i] = (df[i] + cf.F[i](t) * f[i]
                - (f[3 + j] * f[3 + k] - f[j] * f[k]))
        r[3 + i] = (df[3 + i] + cf.G[i](t) * f[3 + i]
                    - (f[3 + j] * f[k] + f[j] * f[3 + k]))
    return float(np.max(np.abs(r)))


def _abelian_residual(s, sol, t, h_rel=1e-5):
    """Defect of the decoupled abelian rate equations at t."""
    cf = coefficient_functions(s)
    h = h_rel * max(t, 1.0)
    lo, hi = sol.valid
    offs, wts = _stencil_nodes(t, h, lo, hi)
    fvals = np.array([sol.coefficients(t + o * h) for o in offs]).T
    df = fvals.dot(wts) / h
    f = np.asarray(sol.coefficients(t), dtype=float)
    r = np.empty(6)
    for i in range(3):
        gp = cf.a_plus_rate[i](t) - 2.0 / t
        gm = cf.a_minus_rate[i](t) + 4.0 / t
        r[i] = df[i] + gp * f[i]
        r[3 + i] = df[3 + i] + gm * f[3 + i]
    return float(np.max(np.abs(r)))


def solution_to_csv(sol, path, ts=None):
    """CSV t,f1p,f2p,f3p,f1m,f2m,f3m,residual_max plus a JSON sidecar."""
    s = sol.structure
    if sol.f6 is None:
        raise ValueError("family %r has no profiles to export" % sol.family)
    if ts is None:
        lo, hi = sol.valid
        lo = max(lo, 1e-2)
        ts = np.linspace(lo, min(hi, 10.0), 101)
    resfn = _abelian_residual if sol.family == "abelian" else \
        residual_pointwise
    with open(path, "w", newline="\n") as fh:
        fh.write("t,f1p,f2p,f3p,f1m,f2m,f3m,residual_max\n")
        for t in ts:
            t = float(t)
            f = sol.coefficients(t)
            try:
                res = resfn(s, sol, t)
            except ValueError:
                res = float("nan")
            row = [t] + [float(v) for v in f] + [res]
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    side = {"family": sol.family, "params": sol.params,
            "bundle": sol.bundle,
            "structure_label": None if s is None else s.label}
    with open(str(path) + ".json", "w", newline="\n") as fh:
        json.dump(side, fh, indent=1, sort_keys=True)
        fh.write("\n")
