# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for IR-IG and the regularized reference solver.

Operates on the flat encoding built by :func:`irig._kernels.compile_plan`.
Floating-point operations are ordered exactly as in the oracle classes so
that both backends produce the same iterates.
"""

from libc.math cimport pow, sqrt
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cdef enum:
    ROW_HINGE = 0
    ROW_PLUS = 1
    ROW_ABS = 2
    UPPER_QUAD = 0
    UPPER_ENET = 1
    SET_BOX = 0
    SET_BALL = 1

cdef double SHRINK = 1.0 - 4.0 * 2.220446049250313e-16


cdef struct Prob:
    Py_ssize_t n
    Py_ssize_t m
    const long long* comp_ptr
    const long long* row_ptr
    const long long* idx
    const double* val
    const int* row_kind
    const double* row_param
    int upper_kind
    double upper_mu
    const double* upper_center
    int set_kind
    const double* lo
    const double* hi
    const double* ball_center
    double radius


cdef Prob _unpack(plan):
    cdef Prob P
    cdef const long long[::1] comp_ptr = plan.comp_ptr
    cdef const long long[::1] row_ptr = plan.row_ptr
    cdef const long long[::1] idx = plan.idx
    cdef const double[::1] val = plan.val
    cdef const int[::1] row_kind = plan.row_kind
    cdef const double[::1] row_param = plan.row_param
    cdef const double[::1] upper_center = plan.upper_center
    cdef const double[::1] lo = plan.lo
    cdef const double[::1] hi = plan.hi
    cdef const double[::1] ball_center = plan.ball_center
    P.n = plan.n
    P.m = plan.m
    P.comp_ptr = &comp_ptr[0]
    P.row_ptr = &row_ptr[0]
    P.idx = &idx[0] if idx.shape[0] else NULL
    P.val = &val[0] if val.shape[0] else NULL
    P.row_kind = &row_kind[0] if row_kind.shape[0] else NULL
    P.row_param = &row_param[0] if row_param.shape[0] else NULL
    P.upper_kind = plan.upper_kind
    P.upper_mu = plan.upper_mu
    P.upper_center = &upper_center[0]
    P.set_kind = plan.set_kind
    P.lo = &lo[0]
    P.hi = &hi[0]
    P.ball_center = &ball_center[0]
    P.radius = plan.radius
    return P


cdef void component_subgrad(const Prob* P, Py_ssize_t i, const double* x, double* g) noexcept nogil:
    """Accumulate the subgradient of component `i` at `x` into `g`."""
    cdef long long r, q
    cdef double s, t, coef
    cdef int kind
    for r in range(P.comp_ptr[i], P.comp_ptr[i + 1]):
        s = 0.0
        for q in range(P.row_ptr[r], P.row_ptr[r + 1]):
            s += P.val[q] * x[P.idx[q]]
        kind = P.row_kind[r]
        if kind == ROW_HINGE:
            t = P.row_param[r]
            if t * s < 1.0:
                coef = -t
            else:
                continue
        elif kind == ROW_PLUS:
            t = s - P.row_param[r]
            if t > 0.0:
                coef = 1.0
            else:
                continue
        else:
            t = s - P.row_param[r]
            if t > 0.0:
                coef = 1.0
            elif t < 0.0:
                coef = -1.0
            else:
                continue
        for q in range(P.row_ptr[r], P.row_ptr[r + 1]):
            g[P.idx[q]] += coef * P.val[q]


cdef inline void upper_subgrad(const Prob* P, const double* x, double* g) noexcept nogil:
    cdef Py_ssize_t j
    cdef double v
    if P.upper_kind == UPPER_QUAD:
        for j in range(P.n):
            g[j] = P.upper_mu * (x[j] - P.upper_center[j])
    else:
        for j in range(P.n):
            v = x[j]
            g[j] = P.upper_mu * v + ((v > 0.0) - (v < 0.0))


cdef void project_inplace(const Prob* P, double* y) noexcept nogil:
    cdef Py_ssize_t j
    cdef double v, nd, scale, e, acc
    if P.set_kind == SET_BOX:
        for j in range(P.n):
            v = y[j]
            if v < P.lo[j]:
                v = P.lo[j]
            if v > P.hi[j]:
                v = P.hi[j]
            y[j] = v
        return
    acc = 0.0
    for j in range(P.n):
        v = y[j] - P.ball_center[j]
        acc += v * v
    nd = sqrt(acc)
    if nd <= P.radius:
        return
    scale = P.radius / nd
    while True:
        acc = 0.0
        for j in range(P.n):
            v = P.ball_center[j] + scale * (y[j] - P.ball_center[j])
            e = v - P.ball_center[j]
            acc += e * e
        if sqrt(acc) <= P.radius:
            break
        scale *= SHRINK
    for j in range(P.n):
        y[j] = P.ball_center[j] + scale * (y[j] - P.ball_center[j])


def irig_advance(plan, double[::1] x, double[::1] xbar, double S,
                 long long k_start, long long k_stop,
                 double gamma0, double a, double lambda0, double b, double r):
    """Run outer iterations ``k_start <= k < k_stop`` in place; return S."""
    cdef Prob P = _unpack(plan)
    cdef Py_ssize_t n = P.n, m = P.m, i, j
    cdef long long k
    cdef double gamma, lam, t, w, S_new
    cdef double* gf
    cdef double* gh
    if x.shape[0] != n or xbar.shape[0] != n:
        raise ValueError("dimension mismatch")
    if k_stop <= k_start:
        return S
    gf = <double*> malloc(n * sizeof(double))
    gh = <double*> malloc(n * sizeof(double))
    if gf == NULL or gh == NULL:
        free(gf)
        free(gh)
        raise MemoryError()
    try:
        with nogil:
            for k in range(k_start, k_stop):
                gamma = gamma0 / pow(<double>(k + 1), a)
                lam = lambda0 / pow(<double>(k + 1), b)
                t = lam / m
                for i in range(m):
                    memset(gf, 0, n * sizeof(double))
                    component_subgrad(&P, i, &x[0], gf)
                    upper_subgrad(&P, &x[0], gh)
                    for j in range(n):
                        x[j] = x[j] - gamma * (gf[j] + t * gh[j])
                    project_inplace(&P, &x[0])
                w = pow(gamma0 / pow(<double>(k + 2), a), r)
                S_new = S + w
                for j in range(n):
                    xbar[j] = (S * xbar[j] + w * x[j]) / S_new
                S = S_new
    finally:
        free(gf)
        free(gh)
    return S


def reference_advance(plan, double[::1] x, double[::1] xbar, double lam,
                      double step_c, double mu_h,
                      long long k_start, long long k_stop):
    """Projected subgradient on ``f + lam*h`` with steps ``c/(mu_h*lam*(k+1))``,
    in place. `xbar` is the uniform average of the points at which
    subgradients were taken."""
    cdef Prob P = _unpack(plan)
    cdef Py_ssize_t n = P.n, m = P.m, i, j
    cdef long long k
    cdef double step
    cdef double* gf
    cdef double* gc
    cdef double* gh
    if x.shape[0] != n or xbar.shape[0] != n:
        raise ValueError("dimension mismatch")
    if k_stop <= k_start:
        return
    gf = <double*> malloc(n * sizeof(double))
    gc = <double*> malloc(n * sizeof(double))
    gh = <double*> malloc(n * sizeof(double))
    if gf == NULL or gc == NULL or gh == NULL:
        free(gf)
        free(gc)
        free(gh)
        raise MemoryError()
    try:
        with nogil:
            for k in range(k_start, k_stop):
                for j in range(n):
                    xbar[j] = xbar[j] + (x[j] - xbar[j]) / (k + 1)
                memset(gf, 0, n * sizeof(double))
                for i in range(m):
                    memset(gc, 0, n * sizeof(double))
                    component_subgrad(&P, i, &x[0], gc)
                    for j in range(n):
                        gf[j] = gf[j] + gc[j]
                upper_subgrad(&P, &x[0], gh)
                step = step_c / (mu_h * lam * (k + 1))
                for j in range(n):
                    x[j] = x[j] - step * (gf[j] + lam * gh[j])
                project_inplace(&P, &x[0])
    finally:
        free(gf)
        free(gc)
        free(gh)
