"""Pure-Python numeric kernels.

This module is the reference implementation of everything on the per-tick hot
path: yaw wrapping, explicit-Euler body updates, waypoint following, rate
limited slewing, rigid-frame composition and the regularized incomplete beta
function. The compiled twin in _speedups.pyx mirrors it operation for
operation so that both backends produce bit-identical trajectories (betainc
is the one documented exception: it calls lgamma, whose CPython and libm
implementations may differ in the last ulp).

Angles are radians wrapped to (-pi, pi]. Distances are meters, time seconds.
All integration is explicit Euler at the caller's substep size.
"""

from math import atan2, cos, exp, fabs, lgamma, log, pi, sin, sqrt

TWO_PI = 2.0 * pi


def wrap_pi(a):
    """Wrap an angle to the half-open interval (-pi, pi]."""
    while a > pi:
        a -= TWO_PI
    while a <= -pi:
        a += TWO_PI
    return a


def unicycle_step(x, y, yaw, v, w, dt):
    """One Euler step of a planar unicycle; displacement lies along yaw."""
    x = x + v * cos(yaw) * dt
    y = y + v * sin(yaw) * dt
    yaw = wrap_pi(yaw + w * dt)
    return x, y, yaw


def drone_translate(x, y, z, vx, vy, vz, dt):
    """One Euler step of free-space translation, clamped to the floor."""
    x = x + vx * dt
    y = y + vy * dt
    z = z + vz * dt
    if z < 0.0:
        z = 0.0
    return x, y, z


def yaw_integrate(yaw, rate, dt):
    return wrap_pi(yaw + rate * dt)


def slew_substep(yaw, target, w_max, dt):
    """Rate-limited yaw step toward target.

    Returns (yaw, rate, reached). On the settling step the yaw lands exactly
    on the wrapped target so that chained quarter turns stay exact.
    """
    delta = wrap_pi(target - yaw)
    limit = w_max * dt
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
        new_yaw = wrap_pi(target)
    else:
        new_yaw = wrap_pi(yaw + step)
    return new_yaw, step / dt, reached


def agv_route_substep(x, y, yaw, tx, ty, v_max, w_max, heading_tol, capture, dt):
    """Turn-then-drive toward waypoint (tx, ty).

    Returns (x, y, yaw, v, w, captured). captured=True means the waypoint was
    already within the capture distance and no motion occurred; the caller
    advances to the next waypoint and retries within the same substep.

    The heading settles exactly on the bearing once within w_max*dt, so the
    subsequent drive segment is straight at the waypoint and the final
    reach-limited step (v = dist/dt) lands on it to rounding error.
    """
    dx = tx - x
    dy = ty - y
    dist = sqrt(dx * dx + dy * dy)
    if dist <= capture:
        return x, y, yaw, 0.0, 0.0, True
    desired = atan2(dy, dx)
    err = wrap_pi(desired - yaw)
    limit = w_max * dt
    if err > limit:
        step = limit
    elif err < -limit:
        step = -limit
    else:
        step = err
    if err > heading_tol or err < -heading_tol:
        yaw = wrap_pi(yaw + step)
        return x, y, yaw, 0.0, step / dt, False
    reach = dist / dt
    v = reach if reach < v_max else v_max
    x = x + v * cos(yaw) * dt
    y = y + v * sin(yaw) * dt
    yaw = wrap_pi(yaw + step)
    return x, y, yaw, v, step / dt, False


def drone_flight_substep(x, y, z, tx, ty, tz, v_max, capture, dt):
    """Straight-line autonomous flight step toward (tx, ty, tz).

    Returns (x, y, z, vx, vy, vz, arrived). The last moving step is reach
    limited (speed = dist/dt) so the body lands on the target to rounding
    error and the following call reports arrival.
    """
    dx = tx - x
    dy = ty - y
    dz = tz - z
    dist = sqrt(dx * dx + dy * dy + dz * dz)
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


def compose_pose(px, py, pz, pyaw, ox, oy, oz, oyaw):
    """World pose of a rigid body-frame offset attached at pose p."""
    c = cos(pyaw)
    s = sin(pyaw)
    x = px + c * ox - s * oy
    y = py + s * ox + c * oy
    z = pz + oz
    return x, y, z, wrap_pi(pyaw + oyaw)


def relative_pose(px, py, pz, pyaw, bx, by, bz, byaw):
    """Body-frame offset of pose b relative to pose p; inverts compose_pose."""
    c = cos(pyaw)
    s = sin(pyaw)
    dx = bx - px
    dy = by - py
    ox = c * dx + s * dy
    oy = c * dy - s * dx
    oz = bz - pz
    return ox, oy, oz, wrap_pi(byaw - pyaw)


def dist2(x0, y0, x1, y1):
    dx = x1 - x0
    dy = y1 - y0
    return sqrt(dx * dx + dy * dy)


def dist3(x0, y0, z0, x1, y1, z1):
    dx = x1 - x0
    dy = y1 - y0
    dz = z1 - z0
    return sqrt(dx * dx + dy * dy + dz * dz)


# Regularized incomplete beta, continued-fraction evaluation (modified Lentz).
# Convergence is geometric for the argument ranges used by the t CDF; 300
# iterations is far beyond what doubles can use.

_CF_TINY = 1e-30
_CF_EPS = 1e-16
_CF_MAX_ITER = 300


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
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


def betainc(a, b, x):
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
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
