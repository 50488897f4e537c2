# cython: language_level=3
"""Compiled twin of warelab._kernels.reference.

Every function mirrors the reference implementation operation for operation:
same expression shapes, same evaluation order, libm transcendentals (which
match CPython's math module bit for bit on this platform, lgamma excepted).
Keep the two files in sync; the parity test suite compares them exhaustively.
"""

from libc.math cimport M_PI, atan2, cos, exp, fabs, lgamma, log, sin, sqrt

TWO_PI = 2.0 * M_PI

cdef double _TWO_PI = 2.0 * M_PI
cdef double _CF_TINY = 1e-30
cdef double _CF_EPS = 1e-16
cdef int _CF_MAX_ITER = 300


cdef inline double _wrap_pi(double a):
    while a > M_PI:
        a -= _TWO_PI
    while a <= -M_PI:
        a += _TWO_PI
    return a


def wrap_pi(double a):
    """Wrap an angle to the half-open interval (-pi, pi]."""
    return _wrap_pi(a)


def unicycle_step(double x, double y, double yaw, double v, double w, double dt):
    """One Euler step of a planar unicycle; displacement lies along yaw."""
    x = x + v * cos(yaw) * dt
    y = y + v * sin(yaw) * dt
    yaw = _wrap_pi(yaw + w * dt)
    return x, y, yaw


def drone_translate(double x, double y, double z, double vx, double vy,
                    double vz, double dt):
    """One Euler step of free-space translation, clamped to the floor."""
    x = x + vx * dt
    y = y + vy * dt
    z = z + vz * dt
    if z < 0.0:
        z = 0.0
    return x, y, z


def yaw_integrate(double yaw, double rate, double dt):
    return _wrap_pi(yaw + rate * dt)


def slew_substep(double yaw, double target, double w_max, double dt):
    """Rate-limited yaw step toward target; lands exactly when settling."""
    cdef double delta = _wrap_pi(target - yaw)
    cdef double limit = w_max * dt
    cdef double step
    cdef bint reached
    cdef double new_yaw
    if delta > limit:
        step = limit
        reached = False
    elif delta < -limit:
        step = -limit
        reached = False
    else:
        step = delta
        reached = True
    if reached:
        new_yaw = _wrap_pi(target)
    else:
        new_yaw = _wrap_pi(yaw + step)
    return new_yaw, step / dt, bool(reached)


def agv_route_substep(double x, double y, double yaw, double tx, double ty,
                      double v_max, double w_max, double heading_tol,
                      double capture, double dt):
    """Turn-then-drive toward waypoint (tx, ty); see the reference docstring."""
    cdef double dx = tx - x
    cdef double dy = ty - y
    cdef double dist = sqrt(dx * dx + dy * dy)
    cdef double desired, err, limit, step, reach, v
    if dist <= capture:
        return x, y, yaw, 0.0, 0.0, True
    desired = atan2(dy, dx)
    err = _wrap_pi(desired - yaw)
    limit = w_max * dt
    if err > limit:
        step = limit
    elif err < -limit:
        step = -limit
    else:
        step = err
    if err > heading_tol or err < -heading_tol:
        yaw = _wrap_pi(yaw + step)
        return x, y, yaw, 0.0, step / dt, False
    reach = dist / dt
    v = reach if reach < v_max else v_max
    x = x + v * cos(yaw) * dt
    y = y + v * sin(yaw) * dt
    yaw = _wrap_pi(yaw + step)
    return x, y, yaw, v, step / dt, False


def drone_flight_substep(double x, double y, double z, double tx, double ty,
                         double tz, double v_max, double capture, double dt):
    """Straight-line autonomous flight step; see the reference docstring."""
    cdef double dx = tx - x
    cdef double dy = ty - y
    cdef double dz = tz - z
    cdef double dist = sqrt(dx * dx + dy * dy + dz * dz)
    cdef double reach, speed, scale, vx, vy, vz
    if dist <= capture:
        return x, y, z, 0.0, 0.0, 0.0, True
    reach = dist / dt
    speed = reach if reach < v_max else v_max
    scale = speed / dist
    vx = dx * scale
    vy = dy * scale
    vz = dz * scale
    x = x + vx * dt
    y = y + vy * dt
    z = z + vz * dt
    return x, y, z, vx, vy, vz, False


def compose_pose(double px, double py, double pz, double pyaw, double ox,
                 double oy, double oz, double oyaw):
    """World pose of a rigid body-frame offset attached at pose p."""
    cdef double c = cos(pyaw)
    cdef double s = sin(pyaw)
    cdef double x = px + c * ox - s * oy
    cdef double y = py + s * ox + c * oy
    cdef double z = pz + oz
    return x, y, z, _wrap_pi(pyaw + oyaw)


def relative_pose(double px, double py, double pz, double pyaw, double bx,
                  double by, double bz, double byaw):
    """Body-frame offset of pose b relative to pose p; inverts compose_pose."""
    cdef double c = cos(pyaw)
    cdef double s = sin(pyaw)
    cdef double dx = bx - px
    cdef double dy = by - py
    cdef double ox = c * dx + s * dy
    cdef double oy = c * dy - s * dx
    cdef double oz = bz - pz
    return ox, oy, oz, _wrap_pi(byaw - pyaw)


def dist2(double x0, double y0, double x1, double y1):
    cdef double dx = x1 - x0
    cdef double dy = y1 - y0
    return sqrt(dx * dx + dy * dy)


def dist3(double x0, double y0, double z0, double x1, double y1, double z1):
    cdef double dx = x1 - x0
    cdef double dy = y1 - y0
    cdef double dz = z1 - z0
    return sqrt(dx * dx + dy * dy + dz * dz)


cdef double _betacf(double a, double b, double x):
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if fabs(delta - 1.0) < _CF_EPS:
            break
    return h


def betainc(double a, double b, double x):
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    cdef double front
    if a <= 0.0 or b <= 0.0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if x <= 0.0:
        if x < 0.0:
            raise ValueError("betainc requires 0 <= x <= 1")
        return 0.0
    if x >= 1.0:
        if x > 1.0:
            raise ValueError("betainc requires 0 <= x <= 1")
        return 1.0
    front = exp(
        lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b
