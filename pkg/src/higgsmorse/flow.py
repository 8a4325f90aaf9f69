"""Yang-Mills-Higgs energy and its metric heat flow on a periodic square lattice.

The holomorphic data is fixed: link variables V_mu(x) = I + a alpha_mu(x) on
the edges x -> x + mu of an N x N torus, and a Higgs field phi(x) at the
sites.  A Hermitian metric h = g^2 (g Hermitian, positive) acts by the
complexified gauge transformation g, giving the unitary-frame fields

    W_mu(x) = g(x) V_mu(x) g(x + mu)^-1,    psi(x) = g(x) phi(x) g(x)^-1.

Energies and moment maps (a = lattice spacing, sums over sites x and mu = 0, 1):

    F(x)   = sum_mu (W_mu(x) W_mu(x)^* - W_mu(x - mu)^* W_mu(x - mu)) / a^2 + diag(flux)
    mu_1   = P(F + [psi, psi^*]), P the projection onto the Lie algebra of
             the structure group (the identity for gl)
    D_mu   = (W_mu(x) psi(x + mu) - psi(x) W_mu(x)) / a,  dbar psi = D / 2
    mu_C   = 2i dbar psi = mu_2 + i mu_3  (entrywise real and imaginary parts)

    restricted = a^2 sum |mu_1|^2,  full = restricted + 4 a^2 sum |dbar psi|^2

Only h moves during a flow, so (alpha, phi) stay bitwise fixed and the flow
remains on one complex gauge orbit.  The inner product on every field is
a^2 sum Re tr(X^* Y).
"""

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NumericalError, ValidationError

TAGS = ("gl", "sl", "slr", "sp")
DEFAULT_TOL = 1e-6
CLUSTER_THRESHOLD = 1e-4
UNDERFLOW = 1e-12

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class LatticeGeometry:
    size: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"lattice size must be >= 1, got {self.size}")
        if not self.spacing > 0:
            raise ValidationError(f"lattice spacing must be > 0, got {self.spacing}")

    @property
    def area(self):
        return self.size * self.size * self.spacing * self.spacing


@dataclass
class FlowState:
    geometry: LatticeGeometry
    rank: int
    base_connection: np.ndarray      # (2, N, N, n, n) complex
    higgs: np.ndarray                # (N, N, n, n) complex
    metric: np.ndarray               # (N, N, n, n) Hermitian positive definite
    group_tag: str = "gl"
    flux: np.ndarray = None          # (n,) real, constant background curvature

    def __post_init__(self):
        n, N = self.rank, self.geometry.size
        if self.group_tag not in TAGS:
            raise ValidationError(f"unknown group tag {self.group_tag!r}; expected one of {TAGS}")
        if self.group_tag in ("slr", "sp") and n != 2:
            raise ValidationError(f"group tag {self.group_tag} is implemented for rank 2 only")
        self.base_connection = np.asarray(self.base_connection, dtype=complex)
        self.higgs = np.asarray(self.higgs, dtype=complex)
        self.metric = np.asarray(self.metric, dtype=complex)
        self.flux = np.zeros(n) if self.flux is None else np.asarray(self.flux, dtype=float)
        for name, arr, shape in (("base_connection", self.base_connection, (2, N, N, n, n)),
                                 ("higgs", self.higgs, (N, N, n, n)),
                                 ("metric", self.metric, (N, N, n, n)),
                                 ("flux", self.flux, (n,))):
            if arr.shape != shape:
                raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")

    def with_metric(self, h):
        return replace(self, metric=h)


# ---------------------------------------------------------------- linear algebra

def _dag(x):
    return np.conj(np.swapaxes(x, -1, -2))


def _herm(x):
    return 0.5 * (x + _dag(x))


def _shift(x, mu, k=1):
    """Value at site x + k e_mu (periodic)."""
    return np.roll(x, -k, axis=mu)


def _ip(x, y, a):
    return a * a * float(np.sum(np.real(np.conj(x) * y)))


def _norm2(x, a):
    return a * a * float(np.sum(np.abs(x) ** 2))


def _eigh(h):
    h = _herm(h)
    w, v = np.linalg.eigh(h)
    return w, v


def _hfunc(h, f):
    """f applied to a stack of Hermitian matrices."""
    w, v = _eigh(h)
    return (v * f(w)[..., None, :]) @ _dag(v)


def metric_root(h):
    w, v = _eigh(h)
    if np.min(w) <= 0:
        raise NumericalError(f"metric lost positive definiteness (min eigenvalue {np.min(w):.3e})")
    s = np.sqrt(w)
    return (v * s[..., None, :]) @ _dag(v), (v * (1 / s)[..., None, :]) @ _dag(v)


def herm_exp(x):
    return _hfunc(x, np.exp)


def herm_log(h):
    return _hfunc(h, np.log)


# ---------------------------------------------------------------- fields

@dataclass
class Fields:
    W: np.ndarray        # (2, N, N, n, n)
    psi: np.ndarray
    F: np.ndarray
    B: np.ndarray        # [psi, psi^*]
    mu1: np.ndarray
    D: np.ndarray        # (2, N, N, n, n)
    g: np.ndarray
    ginv: np.ndarray


def _links(s):
    n = s.rank
    return np.eye(n) + s.geometry.spacing * s.base_connection


def compute_fields(s):
    a = s.geometry.spacing
    g, ginv = metric_root(s.metric)
    V = _links(s)
    W = np.stack([g @ V[m] @ _shift(ginv, m) for m in range(2)])
    psi = g @ s.higgs @ ginv
    F = np.zeros_like(psi)
    for m in range(2):
        Wm = _shift(W[m], m, -1)
        F += (W[m] @ _dag(W[m]) - _dag(Wm) @ Wm) / (a * a)
    F = F + np.diag(s.flux).astype(complex)
    B = psi @ _dag(psi) - _dag(psi) @ psi
    D = np.stack([(W[m] @ _shift(psi, m) - psi @ W[m]) / a for m in range(2)])
    # a subgroup sees the orthogonal projection of the U(n) moment map
    return Fields(W, psi, F, B, project(s.group_tag, F + B), D, g, ginv)


def moment_maps(s):
    """(mu_1, mu_C) with mu_C = 2i dbar psi stacked over the two directions."""
    f = compute_fields(s)
    return f.mu1, 1j * f.D


def ymh_energy(s, variant="restricted"):
    a = s.geometry.spacing
    f = compute_fields(s)
    e = _norm2(f.mu1, a)
    if variant == "restricted":
        return e
    if variant == "full":
        return e + _norm2(f.D, a)
    raise ValidationError(f"unknown energy variant {variant!r}")


def energy_terms(s):
    """Pieces of the expanded full energy."""
    a = s.geometry.spacing
    f = compute_fields(s)
    return {
        "F2": _norm2(f.F, a),
        "B2": _norm2(f.B, a),
        "cross": 2 * _ip(f.F, f.B, a),
        "dbar2": 4 * _norm2(f.D / 2, a),
    }


# ---------------------------------------------------------------- gradients

def _field_gradients(f, a, variant):
    """Gradients of the energy with respect to the unitary-frame fields W, psi."""
    mu = f.mu1
    GW = np.stack([(4 / a**2) * (mu @ f.W[m] - f.W[m] @ _shift(mu, m)) for m in range(2)])
    Gpsi = 4 * (mu @ f.psi - f.psi @ mu)
    if variant == "full":
        for m in range(2):
            D = f.D[m]
            GW[m] += (2 / a) * (D @ _dag(_shift(f.psi, m)) - _dag(f.psi) @ D)
            Dm, Wm = _shift(D, m, -1), _shift(f.W[m], m, -1)
            Gpsi += (2 / a) * (_dag(Wm) @ Dm - D @ _dag(f.W[m]))
    elif variant != "restricted":
        raise ValidationError(f"unknown energy variant {variant!r}")
    return GW, Gpsi


def ymh_gradient(s, variant="restricted"):
    """Gradient of the energy in (alpha, phi) at fixed metric."""
    a = s.geometry.spacing
    f = compute_fields(s)
    GW, Gpsi = _field_gradients(f, a, variant)
    Galpha = np.stack([a * f.g @ GW[m] @ _shift(f.ginv, m) for m in range(2)])
    Gphi = f.g @ Gpsi @ f.ginv
    return Galpha, Gphi


def orbit_gradient(s, variant="restricted", f=None):
    """Hermitian R with dE(exp(eps xi) g) = a^2 sum Re tr(R xi) + O(eps^2)."""
    a = s.geometry.spacing
    f = f or compute_fields(s)
    GW, Gpsi = _field_gradients(f, a, variant)
    M = f.psi @ _dag(Gpsi) - _dag(Gpsi) @ f.psi
    for m in range(2):
        M = M + f.W[m] @ _dag(GW[m]) - _shift(_dag(GW[m]) @ f.W[m], m, -1)
    return _herm(M)


def project(tag, x):
    """Hermitian field -> the directions allowed for the metric of this group."""
    if tag == "gl":
        return x
    n = x.shape[-1]
    tr = np.trace(x, axis1=-2, axis2=-1)[..., None, None]
    x0 = x - tr * np.eye(n) / n
    if tag == "sl":
        return x0
    if tag == "slr":
        e = 1j * J2
    elif tag == "sp":
        e = np.diag([1.0, -1.0]).astype(complex)
    else:
        raise ValidationError(f"unknown group tag {tag!r}")
    c = np.real(np.sum(np.conj(e) * x0, axis=(-2, -1))) / 2.0
    return c[..., None, None] * e


def gradient_norm(s, f=None):
    a = s.geometry.spacing
    return np.sqrt(_norm2(project(s.group_tag, orbit_gradient(s, f=f)), a))


# ---------------------------------------------------------------- flow

@dataclass
class FlowTrace:
    steps: list = field(default_factory=list)     # (time, energy, gradient norm, step)
    limit_report: object = None
    final_state: object = None
    converged: bool = False

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "energy", "gradient_norm", "step"])
        for row in self.steps:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @property
    def energies(self):
        return [r[1] for r in self.steps]

    @property
    def accepted_steps(self):
        return [r[3] for r in self.steps[1:]]


def metric_step(s, dt, f=None):
    """h -> g exp(-2 dt P(mu_1)) g, the explicit step of dh/dt = -2 h mu_1."""
    f = f or compute_fields(s)
    xi = -project(s.group_tag, f.mu1)
    return _herm(f.g @ herm_exp(2 * dt * xi) @ f.g)


def _flow_loop(s, tol, max_steps, dt0, fixed_steps=None, duration=None, callback=None):
    a = s.geometry.spacing
    f = compute_fields(s)
    energy = _norm2(f.mu1, a)
    gnorm = gradient_norm(s, f)
    trace = FlowTrace([(0.0, energy, gnorm, 0.0)])
    t, dt = 0.0, dt0
    steps = fixed_steps if fixed_steps is not None else range(max_steps)
    for k, fixed in enumerate(steps):
        if fixed_steps is None and (gnorm < tol or gnorm == 0.0):
            trace.converged = True
            break
        if duration is not None and t >= duration:
            break
        if fixed_steps is not None:
            s = s.with_metric(metric_step(s, fixed, f))
            f = compute_fields(s)
            dt_used = fixed
            energy = _norm2(f.mu1, a)
        else:
            while True:
                trial = s.with_metric(metric_step(s, dt, f))
                ft = compute_fields(trial)
                e_new = _norm2(ft.mu1, a)
                if e_new < energy:
                    break
                dt /= 2
                if dt < UNDERFLOW:
                    err = NumericalError(
                        f"step size underflow at t={t:.6g} (energy {energy:.6e}, "
                        f"gradient norm {gnorm:.3e})")
                    err.state_dump = state_to_text(s)
                    raise err
            s, f, energy, dt_used = trial, ft, e_new, dt
            dt *= 2
        t += dt_used
        gnorm = gradient_norm(s, f)
        trace.steps.append((t, energy, gnorm, dt_used))
        if callback is not None:
            callback(s)
    else:
        if fixed_steps is None and (gnorm < tol or gnorm == 0.0):
            trace.converged = True
    trace.final_state = s
    return trace


def heat_flow_run(s, tolerance=DEFAULT_TOL, max_steps=20000, duration=None, callback=None):
    """Backtracking explicit flow of the metric until the gradient norm drops
    below tolerance.  A rejected step halves dt; an accepted one doubles it for
    the next attempt."""
    if not tolerance > 0:
        raise ValidationError(f"tolerance must be > 0, got {tolerance}")
    if max_steps < 0:
        raise ValidationError(f"max_steps must be >= 0, got {max_steps}")
    dt0 = 1e-2 * s.geometry.spacing ** 2
    trace = _flow_loop(s, tolerance, max_steps, dt0, duration=duration, callback=callback)
    trace.limit_report = classify_limit(trace.final_state)
    return trace


# ---------------------------------------------------------------- limits

@dataclass(frozen=True)
class Cluster:
    value: float
    multiplicity: int
    spread: float


@dataclass(frozen=True)
class LimitReport:
    clusters: tuple
    status: str = "candidate"

    @property
    def multiplicities(self):
        return tuple(c.multiplicity for c in self.clusters)

    @property
    def max_spread(self):
        return max(c.spread for c in self.clusters)


def classify_limit(s, threshold=CLUSTER_THRESHOLD):
    """Group the per-site eigenvalues of mu_1 into constant levels.

    Eigenvalue column j (ascending at each site) has a site-to-site spread;
    neighbouring columns whose means differ by less than the threshold merge.
    The multiplicities are candidate Harder-Narasimhan ranks only.
    """
    f = compute_fields(s)
    ev = np.linalg.eigvalsh(_herm(f.mu1)).reshape(-1, s.rank)
    means = ev.mean(axis=0)
    clusters = []
    start = 0
    for j in range(1, s.rank + 1):
        if j == s.rank or means[j] - means[j - 1] >= threshold:
            block = ev[:, start:j]
            clusters.append(Cluster(float(block.mean()), j - start,
                                    float(block.max() - block.min())))
            start = j
    return LimitReport(tuple(clusters))


# ---------------------------------------------------------------- constructions

def _hermitian_noise(rng, shape, scale):
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * _herm(x)


def random_state(size, rank, seed, spacing=1.0, amplitude=0.3, metric_amplitude=0.0,
                 group_tag="gl"):
    """Random holomorphic data; the metric is I or exp of random Hermitian noise."""
    rng = np.random.default_rng(seed)
    N, n = size, rank
    geo = LatticeGeometry(N, spacing)
    cn = lambda shape: rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if group_tag == "slr":
        c = amplitude * cn((2, N, N))
        alpha = c[..., None, None] * J2
        u, v = amplitude * cn((N, N)), amplitude * cn((N, N))
        phi = np.stack([np.stack([u, v], -1), np.stack([v, -u], -1)], -2)
        s0 = metric_amplitude * rng.standard_normal((N, N))
        h = herm_exp(s0[..., None, None] * (1j * J2))
    elif group_tag == "sp":
        c = amplitude * cn((2, N, N))
        alpha = c[..., None, None] * np.diag([1.0, -1.0])
        b, cc = amplitude * cn((N, N)), amplitude * cn((N, N))
        z = np.zeros((N, N))
        phi = np.stack([np.stack([z, b], -1), np.stack([cc, z], -1)], -2)
        s0 = metric_amplitude * rng.standard_normal((N, N))
        h = herm_exp(s0[..., None, None] * np.diag([1.0, -1.0]))
    else:
        alpha = amplitude * cn((2, N, N, n, n))
        phi = amplitude * cn((N, N, n, n))
        if group_tag == "sl":
            alpha -= np.trace(alpha, axis1=-2, axis2=-1)[..., None, None] * np.eye(n) / n
            phi -= np.trace(phi, axis1=-2, axis2=-1)[..., None, None] * np.eye(n) / n
        if metric_amplitude:
            h = herm_exp(_hermitian_noise(rng, (N, N, n, n), metric_amplitude))
        else:
            h = np.broadcast_to(np.eye(n, dtype=complex), (N, N, n, n)).copy()
    return FlowState(geo, n, alpha, phi, h, group_tag)


def zero_state(size, rank, spacing=1.0, flux=None, group_tag="gl"):
    N, n = size, rank
    eye = np.broadcast_to(np.eye(n, dtype=complex), (N, N, n, n)).copy()
    return FlowState(LatticeGeometry(N, spacing), n, np.zeros((2, N, N, n, n), complex),
                     np.zeros((N, N, n, n), complex), eye, group_tag, flux)


def gauge_transform(s, u):
    """Site-wise unitary u acting on links, Higgs field and metric."""
    a = s.geometry.spacing
    V = _links(s)
    V2 = np.stack([u @ V[m] @ _dag(_shift(u, m)) for m in range(2)])
    alpha = (V2 - np.eye(s.rank)) / a
    return replace(s, base_connection=alpha, higgs=u @ s.higgs @ _dag(u),
                   metric=u @ s.metric @ _dag(u))


def random_unitary_field(rng, shape, n):
    z = rng.standard_normal(shape + (n, n)) + 1j * rng.standard_normal(shape + (n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def rotate_higgs(s, theta):
    return replace(s, higgs=np.exp(1j * theta) * s.higgs)


def hodge_block_state(size, blocks, seed, spacing=1.0, amplitude=0.3):
    """Links block-diagonal for the given block sizes, phi mapping block 0 into
    block 1 (and block k into k + 1).  Returns the state and per-coordinate weights."""
    rng = np.random.default_rng(seed)
    n = sum(blocks)
    N = size
    edges = np.cumsum((0,) + tuple(blocks))
    alpha = np.zeros((2, N, N, n, n), complex)
    phi = np.zeros((N, N, n, n), complex)
    weights = np.zeros(n)
    cn = lambda shape: rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for k, b in enumerate(blocks):
        sl = slice(edges[k], edges[k + 1])
        alpha[..., sl, sl] = amplitude * cn((2, N, N, b, b))
        weights[sl] = k
        if k + 1 < len(blocks):
            tgt = slice(edges[k + 1], edges[k + 2])
            phi[..., tgt, sl] = amplitude * cn((N, N, blocks[k + 1], b))
    eye = np.broadcast_to(np.eye(n, dtype=complex), (N, N, n, n)).copy()
    return FlowState(LatticeGeometry(N, spacing), n, alpha, phi, eye, "gl"), weights


@dataclass(frozen=True)
class S1Report:
    theta: float
    energy_rel_diff: float
    norm_rel_diff: float
    fixed_point_diff: object      # max abs difference, or None without weights


def s1_action_check(s, theta, weights=None):
    """Compare (A, e^{i theta} phi) with the original, and with the gauge
    transform exp(i theta diag(weights)) when weights are given."""
    a = s.geometry.spacing
    rot = rotate_higgs(s, theta)
    e0, e1 = ymh_energy(s, "full"), ymh_energy(rot, "full")
    n0, n1 = _norm2(s.higgs, a), _norm2(rot.higgs, a)
    rel = lambda x, y: abs(x - y) / max(abs(x), abs(y), 1e-300)
    fixed = None
    if weights is not None:
        u1 = np.diag(np.exp(1j * theta * np.asarray(weights, float)))
        u = np.broadcast_to(u1, s.higgs.shape)
        moved = gauge_transform(s, u)
        fixed = max(float(np.max(np.abs(moved.higgs - rot.higgs))),
                    float(np.max(np.abs(moved.base_connection - rot.base_connection))))
    return S1Report(theta, rel(e0, e1), rel(n0, n1), fixed)


# ---------------------------------------------------------------- real forms

def constraint_deviation(tag, h):
    """Distance of log h from the metrics allowed by the real form."""
    L = herm_log(h)
    return float(np.sqrt(np.sum(np.abs(L - project(tag, L)) ** 2)))


@dataclass(frozen=True)
class RestrictionReport:
    tag: str
    duration: float
    constraint_deviation: float
    twin_distance: float
    per_unit_time: float
    steps: int


def restriction_check(real_tag, s, duration, max_steps=5000):
    """Run the ambient sl(n,C) flow from constrained data and replay its step
    sizes on the flow constrained to the real form; report the largest
    deviations seen."""
    if real_tag not in ("slr", "sp"):
        raise ValidationError(f"restriction check needs a real-form tag, got {real_tag!r}")
    if not duration > 0:
        raise ValidationError(f"duration must be > 0, got {duration}")
    ambient0 = replace(s, group_tag="sl")
    cons_dev = [constraint_deviation(real_tag, s.metric)]
    amb_metrics = []

    def record(state):
        cons_dev.append(constraint_deviation(real_tag, state.metric))
        amb_metrics.append(state.metric)

    amb = _flow_loop(ambient0, 0.0, max_steps, 1e-2 * s.geometry.spacing ** 2,
                     duration=duration, callback=record)
    twin = []
    replay = iter(amb_metrics)

    def compare(state):
        twin.append(float(np.sqrt(np.sum(np.abs(state.metric - next(replay)) ** 2))))

    _flow_loop(replace(s, group_tag=real_tag), 0.0, 0, 0.0,
               fixed_steps=amb.accepted_steps, callback=compare)
    t_end = amb.steps[-1][0]
    worst_c = max(cons_dev)
    worst_t = max(twin, default=0.0)
    rate = (worst_c + worst_t) / t_end if t_end > 0 else worst_c + worst_t
    return RestrictionReport(real_tag, t_end, worst_c, worst_t, rate, len(amb.steps) - 1)


# ---------------------------------------------------------------- abelian oracle

def abelian_laplacian_eigenvalues(size, spacing):
    k = np.arange(size)
    s2 = np.sin(np.pi * k / size) ** 2
    return (4 / spacing**2) * (s2[:, None] + s2[None, :])


def abelian_linear_prediction(s0, steps):
    """Linearised rank-one flow: each Fourier mode of log h is multiplied by
    (1 - 2 dt lambda_k) per accepted step."""
    log_h = np.real(s0.metric[..., 0, 0])
    log_h = np.log(log_h)
    lam = abelian_laplacian_eigenvalues(s0.geometry.size, s0.geometry.spacing)
    modes = np.fft.fft2(log_h)
    for dt in steps:
        modes = modes * (1 - 2 * dt * lam)
    return np.real(np.fft.ifft2(modes))


# ---------------------------------------------------------------- text format

def state_to_text(s):
    """Header lines, then one line per site in row-major order with the real
    and imaginary parts of every matrix entry (row-major) at full precision."""
    N, n = s.geometry.size, s.rank
    out = [
        "# lattice state",
        f"size {N}",
        f"spacing {s.geometry.spacing!r}",
        f"rank {n}",
        f"group {s.group_tag}",
        "flux " + " ".join(repr(float(x)) for x in s.flux),
    ]

    def block(name, arr):
        out.append(f"field {name}")
        for i in range(N):
            for j in range(N):
                m = arr[i, j].reshape(-1)
                out.append(" ".join(f"{float(x.real)!r} {float(x.imag)!r}" for x in m))

    block("alpha0", s.base_connection[0])
    block("alpha1", s.base_connection[1])
    block("higgs", s.higgs)
    block("metric", s.metric)
    return "\n".join(out) + "\n"


def state_from_text(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    head = {}
    i = 0
    while not lines[i].startswith("field"):
        key, _, val = lines[i].partition(" ")
        head[key] = val
        i += 1
    N, n = int(head["size"]), int(head["rank"])
    fields = {}
    while i < len(lines):
        name = lines[i].split()[1]
        rows = lines[i + 1: i + 1 + N * N]
        vals = np.array([[float(x) for x in r.split()] for r in rows])
        fields[name] = (vals[:, 0::2] + 1j * vals[:, 1::2]).reshape(N, N, n, n)
        i += 1 + N * N
    flux = [float(x) for x in head.get("flux", "").split()] or None
    return FlowState(LatticeGeometry(N, float(head["spacing"])), n,
                     np.stack([fields["alpha0"], fields["alpha1"]]), fields["higgs"],
                     fields["metric"], head["group"], flux)
