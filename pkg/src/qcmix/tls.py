"""Two-level system under the mixed dynamics, in closed form.

With ``rho_12 = x + i y`` and ``rho_11 = z`` the blended dynamics of a single spin
(``H = -h sigma^z - Gamma sigma^x``) reduce to

    d rho_11 = -i (1-alpha) Gamma (rho_12 - rho_21) + alpha F
    d rho_12 = -i (1 - b alpha) Gamma (rho_11 - rho_22) - (c alpha/2 - 2 i h) rho_12

with ``b = (1 - (rho_12/|rho_12|)^2)/2``, the classical feed ``F`` (``rho_22`` at T=0)
and ``c = (rho_11 - rho_22) F / (rho_11 rho_22)``. The state is pure, so on the
manifold ``x^2 + y^2 = z(1-z)`` it is fully described by ``(z, theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ZERO_TEMPERATURE = 0.0

_Z_GRID = np.linspace(0.05, 0.95, 19)
_THETA_GRID = np.arange(8) * (np.pi / 4)
_DEDUP_TOL = 1e-8
_FD_STEP = 1e-6
_ALPHA0_PROBE = 1e-6
# Newton starts still this far from a root after this many iterations are abandoned
_STALL_ITER = 25
_STALL_RESIDUAL = 1e-4


@dataclass(frozen=True)
class TlsParams:
    h: float
    gamma_x: float
    alpha: float
    temperature: float = ZERO_TEMPERATURE

    def __post_init__(self):
        if not self.h > 0 or not self.gamma_x > 0:
            raise ValueError(f"h and gamma_x must be positive, got h={self.h}, gamma_x={self.gamma_x}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.temperature >= 0.0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")

    def boltzmann_weight(self) -> float:
        """``exp(-2 beta h)``: ratio of excited to ground Boltzmann factors (0 at T=0)."""
        if self.temperature == ZERO_TEMPERATURE:
            return 0.0
        return math.exp(-2.0 * self.h / self.temperature)

    def classical_z(self) -> float:
        """Equilibrium ``rho_11`` of the two-level master equation."""
        return 1.0 / (1.0 + self.boltzmann_weight())

    def quantum_ground_z(self) -> float:
        return 0.5 * (1.0 + self.h / math.hypot(self.h, self.gamma_x))


@dataclass(frozen=True)
class TlsState:
    z: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.z <= 1.0:
            raise ValueError(f"z must lie in [0, 1], got {self.z}")

    @property
    def xyz(self) -> tuple[float, float, float]:
        m = math.sqrt(self.z * (1.0 - self.z))
        return m * math.cos(self.theta), m * math.sin(self.theta), self.z

    @classmethod
    def from_xyz(cls, x: float, y: float, z: float) -> "TlsState":
        return cls(z, math.atan2(y, x))

    @classmethod
    def from_amplitudes(cls, a: np.ndarray) -> "TlsState":
        rho12 = a[0] * np.conj(a[1])
        return cls(float(abs(a[0]) ** 2), float(np.angle(rho12)))


@dataclass(frozen=True)
class StationaryPoint:
    state: TlsState
    stability: str
    jacobian_eigen_real_parts: tuple[float, ...]
    xyz: tuple[float, float, float]

    @property
    def z(self) -> float:
        return self.state.z

    @property
    def purity_defect(self) -> float:
        x, y, z = self.xyz
        return abs(x * x + y * y - z * (1.0 - z))


def _rhs(x, y, z, p: TlsParams):
    """Vectorised real-form right-hand side; no domain checks."""
    w = p.boltzmann_weight()
    rho12 = x + 1j * y
    r11, r22 = z, 1.0 - z
    feed = (r22 - r11 * w) / (1.0 + w)
    delta = r11 - r22
    c = delta * feed / (r11 * r22)
    unit = rho12 / np.abs(rho12)
    b = 0.5 * (1.0 - unit * unit)
    a, g, h = p.alpha, p.gamma_x, p.h
    dz = 2.0 * (1.0 - a) * g * y + a * feed
    d12 = -1j * (1.0 - b * a) * g * delta - (0.5 * c * a - 2j * h) * rho12
    return d12.real, d12.imag, dz


def tls_rhs(state, params: TlsParams) -> tuple[float, float, float]:
    """``(dx, dy, dz)`` at ``state``, given as a ``TlsState`` or an ``(x, y, z)`` triple."""
    x, y, z = state.xyz if isinstance(state, TlsState) else state
    if not 0.0 < z < 1.0:
        raise ValueError(f"rhs is singular at z={z}; need 0 < z < 1")
    if x == 0.0 and y == 0.0:
        raise ValueError("rhs undefined for rho_12 = 0")
    dx, dy, dz = _rhs(x, y, z, params)
    return float(dx), float(dy), float(dz)


def reduced_rhs(z, theta, p: TlsParams):
    """``(dz/dt, dtheta/dt)`` on the purity manifold (vectorised)."""
    m = np.sqrt(z * (1.0 - z))
    x, y = m * np.cos(theta), m * np.sin(theta)
    dx, dy, dz = _rhs(x, y, z, p)
    return dz, (x * dy - y * dx) / (m * m)


def integrate(params: TlsParams, z0: float, theta0: float, t_end: float, dt: float = 1e-3,
              every: int = 1):
    """RK4 integration of the full (x, y, z) system. Returns ``(t, xyz)`` sampled every ``every`` steps."""
    nsteps = max(1, math.ceil(t_end / dt - 1e-9))
    m = math.sqrt(z0 * (1.0 - z0))
    v = np.array([m * math.cos(theta0), m * math.sin(theta0), z0])

    def f(u):
        return np.array(_rhs(u[0], u[1], u[2], params))

    ts, out = [0.0], [v.copy()]
    t = 0.0
    for k in range(nsteps):
        h = min(dt, t_end - t)
        k1 = f(v)
        k2 = f(v + 0.5 * h * k1)
        k3 = f(v + 0.5 * h * k2)
        k4 = f(v + h * k3)
        v = v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (k + 1) * dt if k + 1 < nsteps else t_end
        if (k + 1) % every == 0 or k + 1 == nsteps:
            ts.append(t)
            out.append(v.copy())
    return np.array(ts), np.array(out)


def _fd_jacobian(f, u):
    """Central-difference Jacobian of a batched map ``f: (m, d) -> (m, d)``."""
    d = u.shape[-1]
    cols = []
    for k in range(d):
        e = np.zeros(d)
        e[k] = _FD_STEP
        cols.append((f(u + e) - f(u - e)) / (2 * _FD_STEP))
    return np.stack(cols, axis=-1)


def _reduced_map(p: TlsParams):
    return lambda u: np.stack(reduced_rhs(u[..., 0], u[..., 1], p), axis=-1)


def _full_map(p: TlsParams):
    return lambda u: np.stack(_rhs(u[..., 0], u[..., 1], u[..., 2], p), axis=-1)


def _newton(f, u, clip, max_step, max_iter: int = 80, tol: float = 1e-12):
    """Damped Newton for a batch of starts ``u`` (shape ``(m, d)``).

    Steps are capped component-wise by ``max_step`` and halved until the max-norm
    residual decreases; ``clip`` projects iterates back into the domain. Starts that
    converge or stall drop out of the batch.
    """
    u = clip(np.array(u, dtype=float))
    live = np.arange(u.shape[0])
    with np.errstate(all="ignore"):
        for it in range(max_iter):
            if live.size == 0:
                break
            v = u[live]
            fv = f(v)
            fn = np.abs(fv).max(axis=-1)
            fn = np.where(np.isfinite(fn), fn, np.inf)
            jac = _fd_jacobian(f, v)
            ok = (fn >= tol) & np.isfinite(fn) & np.all(np.isfinite(jac), axis=(-2, -1))
            if it >= _STALL_ITER:
                ok &= fn < _STALL_RESIDUAL
            ok[ok] = np.abs(np.linalg.det(jac[ok])) > 1e-300
            v, fv, fn, jac = v[ok], fv[ok], fn[ok], jac[ok]
            live = live[ok]
            step = np.linalg.solve(jac, -fv[..., None])[..., 0]
            lam = np.min(np.minimum(1.0, max_step / (np.abs(step) + 1e-300)), axis=-1)
            accepted = np.zeros(live.size, dtype=bool)
            for _ in range(12):
                todo = ~accepted
                cand = clip(v[todo] + lam[todo, None] * step[todo])
                cf = np.abs(f(cand)).max(axis=-1)
                good = cf < fn[todo]
                sel = np.flatnonzero(todo)[good]
                u[live[sel]] = cand[good]
                accepted[sel] = True
                if accepted.all():
                    break
                lam[todo] *= 0.5
            live = live[accepted]
        res = np.abs(f(u)).max(axis=-1)
    return u, np.where(np.isfinite(res), res, np.inf)


def _eig_real(jac) -> tuple[float, ...]:
    return tuple(float(v) for v in np.sort(np.linalg.eigvals(jac).real)[::-1])


def _point(xyz, jac) -> StationaryPoint:
    x, y, z = (float(v) for v in xyz)
    re = _eig_real(jac)
    label = "stable" if all(v < 0.0 for v in re) else "unstable"
    return StationaryPoint(TlsState(z, float(np.mod(math.atan2(y, x), 2 * np.pi))), label, re,
                           (x, y, z))


def _reduced_jacobian(z, theta, p: TlsParams):
    return _fd_jacobian(_reduced_map(p), np.array([[z, theta]]))[0]


def _quantum_eigenstates(p: TlsParams) -> list[StationaryPoint]:
    # alpha=0 is conservative (centres); classify by the alpha -> 0+ limit instead
    zg = p.quantum_ground_z()
    probe = TlsParams(p.h, p.gamma_x, _ALPHA0_PROBE, p.temperature)
    out = []
    for z, theta in ((zg, 0.0), (1.0 - zg, np.pi)):
        st = TlsState(z, theta)
        out.append(_point(st.xyz, _reduced_jacobian(z, theta, probe)))
    return out


def _classical_fixed_point(p: TlsParams) -> list[StationaryPoint]:
    # At alpha=1 the population decouples from the phase: dz/dt = (1 - z - z w)/(1 + w),
    # with slope -1 in z; the phase is gauge and carries no stability information.
    z = p.classical_z()
    return [StationaryPoint(TlsState(z, 0.0), "stable", (-1.0, -1.0), TlsState(z, 0.0).xyz)]


def _dedupe(points: np.ndarray) -> np.ndarray:
    kept: list[np.ndarray] = []
    for u in points[np.lexsort(points.T[::-1])]:
        if all(np.abs(u - k).max() >= _DEDUP_TOL for k in kept):
            kept.append(u)
    return np.array(kept).reshape(-1, points.shape[-1])


def _solve_manifold(p: TlsParams, seeds) -> list[StationaryPoint]:
    zz, tt = np.meshgrid(_Z_GRID, _THETA_GRID, indexing="ij")
    starts = np.column_stack([zz.ravel(), tt.ravel()])
    if len(seeds):
        seeds = np.asarray(seeds, dtype=float)
        starts = np.vstack([starts, np.column_stack([seeds[:, 2], np.arctan2(seeds[:, 1], seeds[:, 0])])])

    def clip(u):
        return np.column_stack([np.clip(u[:, 0], 1e-12, 1 - 1e-12), u[:, 1]])

    u, res = _newton(_reduced_map(p), starts, clip, np.array([0.2, 0.5]))
    good = (res < 1e-10) & (u[:, 0] > 1e-9) & (u[:, 0] < 1 - 1e-9)
    roots = u[good]
    roots[:, 1] = np.mod(roots[:, 1], 2 * np.pi)
    roots[:, 1] = np.where(roots[:, 1] > 2 * np.pi - 1e-9, 0.0, roots[:, 1])
    return [_point(TlsState(z, t).xyz, _reduced_jacobian(z, t, p)) for z, t in _dedupe(roots)]


def _solve_full(p: TlsParams, seeds) -> list[StationaryPoint]:
    zz, tt, mm = np.meshgrid(_Z_GRID, _THETA_GRID, (0.5, 1.0, 1.5), indexing="ij")
    mag = mm * np.sqrt(zz * (1 - zz))
    starts = np.column_stack([(mag * np.cos(tt)).ravel(), (mag * np.sin(tt)).ravel(), zz.ravel()])
    if len(seeds):
        starts = np.vstack([starts, np.asarray(seeds, dtype=float)])

    def clip(u):
        return np.column_stack([u[:, 0], u[:, 1], np.clip(u[:, 2], 1e-12, 1 - 1e-12)])

    f = _full_map(p)
    u, res = _newton(f, starts, clip, np.array([0.1, 0.1, 0.1]))
    good = (res < 1e-10) & (u[:, 2] > 1e-9) & (u[:, 2] < 1 - 1e-9)
    roots = _dedupe(u[good])
    return [_point(r, _fd_jacobian(f, r[None, :])[0]) for r in roots]


def tls_stationary(params: TlsParams, seeds=(), space: str = "manifold") -> list[StationaryPoint]:
    """All stationary points, stable first, then by decreasing ``z``.

    ``space="manifold"`` solves on the pure-state manifold in ``(z, theta)`` with a
    2x2 stability Jacobian; this is the analysis that matches pure-state dynamics.
    ``space="full"`` solves the three real equations in ``(x, y, z)`` without the
    purity constraint and classifies with the 3x3 Jacobian, so stability also
    accounts for directions transverse to the manifold. ``seeds`` are extra
    ``(x, y, z)`` starting points.
    """
    if space not in ("manifold", "full"):
        raise ValueError(f"unknown space {space!r}")
    if params.alpha == 0.0:
        points = _quantum_eigenstates(params)
    elif params.alpha == 1.0:
        points = _classical_fixed_point(params)
    elif space == "manifold":
        points = _solve_manifold(params, seeds)
    else:
        points = _solve_full(params, seeds)
    points.sort(key=lambda sp: (sp.stability != "stable", -sp.z))
    return points


@dataclass(frozen=True)
class BranchRow:
    value: float
    branch: int
    z: float
    x: float
    y: float
    stability: str


def sweep_stationary(base: TlsParams, vary: str, values, space: str = "manifold") -> list[BranchRow]:
    """Trace stationary branches along ``alpha`` or ``temperature``.

    Roots at each grid value are warm-started from the previous value's roots and
    attached to the nearest existing branch (distance in ``(x, y, z)``).
    """
    if vary not in ("alpha", "temperature"):
        raise ValueError(f"can only vary alpha or temperature, not {vary!r}")
    values = list(values)
    if not values:
        raise ValueError("empty sweep grid")
    rows: list[BranchRow] = []
    last: dict[int, np.ndarray] = {}
    next_id = 0
    for v in values:
        p = TlsParams(base.h, base.gamma_x,
                      v if vary == "alpha" else base.alpha,
                      v if vary == "temperature" else base.temperature)
        points = tls_stationary(p, list(last.values()), space)
        free = dict(last)
        current: dict[int, np.ndarray] = {}
        for sp in points:
            xyz = np.array(sp.xyz)
            if free:
                bid = min(free, key=lambda k: np.linalg.norm(free[k] - xyz))
                if np.linalg.norm(free[bid] - xyz) > 0.25:
                    bid = None
            else:
                bid = None
            if bid is None:
                bid, next_id = next_id, next_id + 1
            else:
                del free[bid]
            current[bid] = xyz
            rows.append(BranchRow(float(v), bid, sp.z, float(xyz[0]), float(xyz[1]), sp.stability))
        last = current
    return rows


def stable_curve(rows: list[BranchRow]) -> tuple[np.ndarray, np.ndarray]:
    """Highest-``z`` stable root per grid value."""
    best: dict[float, float] = {}
    for r in rows:
        if r.stability == "stable" and r.z > best.get(r.value, -1.0):
            best[r.value] = r.z
    keys = sorted(best)
    return np.array(keys), np.array([best[k] for k in keys])


def locate_kink(values: np.ndarray, z: np.ndarray) -> float:
    """Grid value where the discrete curvature ``|z''|`` of the curve peaks."""
    values = np.asarray(values, dtype=float)
    z = np.asarray(z, dtype=float)
    h1 = np.diff(values)
    slope = np.diff(z) / h1
    curv = np.abs(np.diff(slope)) / (0.5 * (h1[1:] + h1[:-1]))
    return float(values[1:-1][np.argmax(curv)])


def optical_bloch_rhs(rho_gg: float, rho_ge: complex, rabi: complex, detuning: float,
                      decay: float) -> tuple[float, complex]:
    """Optical Bloch equations in the rotating frame for ``(rho_gg, rho_ge)``."""
    rho_ee = 1.0 - rho_gg
    rho_eg = np.conj(rho_ge)
    d_gg = decay * rho_ee + 0.5j * (np.conj(rabi) * rho_eg - rabi * rho_ge)
    d_ge = -(0.5 * decay + 1j * detuning) * rho_ge + 0.5j * np.conj(rabi) * (rho_ee - rho_gg)
    return float(np.real(d_gg)), complex(d_ge)


def bloch_mapping(params: TlsParams) -> tuple[float, float, float]:
    """``(rabi, detuning, decay)`` matching the weak-coupling limit of the mixed dynamics."""
    return 2.0 * params.gamma_x, -2.0 * params.h, params.alpha
