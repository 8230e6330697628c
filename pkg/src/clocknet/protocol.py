"""End-to-end protocol: heralded entanglement, free evolution, photonic readout.

Two execution paths share the same physics:

* the reference path (:func:`run_entanglement`, :func:`run_free_evolution`,
  :func:`run_readout`) runs the density-matrix pipeline for one set of noise
  phases;
* :func:`visibility_curve` samples many noise draws.  The click probabilities
  are trigonometric polynomials of low degree in the heralding phase ``xi``
  and the readout phase ``delta + xi'``, so the pipeline is evaluated on a
  small grid of phases, Fourier-decomposed once per ``T``, and every trial is
  then an exact evaluation of that polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks

from . import rng
from .emitter import (A, G, HALF_PI, PI, SPIN_DIM, EmitterParams, depolarize, emission_channel,
                      excite, free_evolution, prepare_initial, pulse, weak_excitation)
from .photonics import (DetectorModel, ReadoutProbabilities, arm1_photons, herald_click,
                        instability_phase, loss, readout_click_probs, slot_povm)
from .qlinalg import (DensityOperator, HilbertFactorization, apply_channel, apply_unitary,
                      fidelity_pure, partial_trace, tensor)
from .spacetime import ClockSpec, SiteWorldline

SPINS = ("s1", "s2")
PORTS = ("p1", "p2")
MODES = ("E1", "L1", "E2", "L2")

BELL = np.zeros(9, dtype=complex)
BELL[3 * G + A] = BELL[3 * A + G] = 1 / math.sqrt(2)

# Fourier grid sizes for the noise-phase decomposition (odd, so orders are symmetric).
XI_GRID = 5
PHI_GRID = 7


def uniform_deltas(n: int = 64) -> tuple[float, ...]:
    return tuple(2 * math.pi * k / n for k in range(n))


@dataclass(frozen=True)
class ExperimentConfig:
    node1: EmitterParams = field(default_factory=EmitterParams)
    node2: EmitterParams = field(default_factory=EmitterParams)
    clock: ClockSpec = field(default_factory=lambda: ClockSpec.from_wavelength(698e-9))
    site1: SiteWorldline = field(default_factory=lambda: SiteWorldline(0.0))
    site2: SiteWorldline = field(default_factory=lambda: SiteWorldline(0.0))
    xi_mean: float = 0.0
    xi_std: float = 0.0
    xi_prime_mean: float = 0.0
    xi_prime_std: float = 0.0
    eta_o: float = 1.0
    eta_t: float = 1.0
    eta_d: float = 1.0
    varphi: float = 0.0
    deltas: tuple[float, ...] = field(default_factory=uniform_deltas)
    times: tuple[float, ...] = (0.0,)
    trials: int = 1
    seed: int = 0
    scenario: str = "custom"
    # draw xi_1 and xi_2 separately (relative phase variance doubles) instead of
    # one relative phase per trial
    independent_arm_phases: bool = False
    shots: int = 0

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if not self.deltas or not self.times:
            raise ValueError("delta and T grids must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name in ("eta_o", "eta_t", "eta_d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.xi_std < 0 or self.xi_prime_std < 0:
            raise ValueError("phase-noise standard deviations must be non-negative")
        if any(t < 0 for t in self.times):
            raise ValueError("free-evolution times must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def transmission(self) -> float:
        return self.eta_o * self.eta_t

    @property
    def attempt_time(self) -> float:
        return max(self.node1.T_c, self.node2.T_c)

    def detector(self, number_resolving: bool = False) -> DetectorModel:
        return DetectorModel(self.eta_d, number_resolving=number_resolving)

    def nodes(self):
        return ((self.node1, SPINS[0], self.site1), (self.node2, SPINS[1], self.site2))

    def without_noise(self) -> "ExperimentConfig":
        return replace(self, xi_std=0.0, xi_prime_std=0.0)

    @classmethod
    def ideal(cls, **kw) -> "ExperimentConfig":
        """Unit efficiencies, no phase noise, no depolarization."""
        node = EmitterParams(eta_i=1.0, epsilon=kw.pop("epsilon", 0.1), p_c=1.0, p_c_prime=1.0,
                             Omega=0.5, phi_pi=0.0, T_d=math.inf, T_c=0.0)
        return cls(node1=node, node2=node, **kw)


@dataclass(frozen=True)
class HeraldOutcome:
    rho4: DensityOperator | None
    P_s: float
    fidelity_to_bell: float

    @property
    def succeeded(self) -> bool:
        return self.rho4 is not None


@dataclass(frozen=True)
class VisibilityPoint:
    T: float
    nu: float
    nu_std: float
    P_s: float
    p_plus_at_delta0: float = float("nan")
    p_click: float = float("nan")
    raw_amplitude: float = float("nan")
    degenerate: bool = False
    nu_ps: float | None = None
    p_select: float | None = None
    lambda_gap: float | None = None


@dataclass(frozen=True)
class PostselectedResult:
    nu_ps: float
    p_select: float
    lambda_gap: float


# ---------------------------------------------------------------------------
# step 1: heralded entanglement


def _vacuum(label: str) -> DensityOperator:
    return DensityOperator.basis(HilbertFactorization.of((label, 2)), 0)


def emitting_node(params: EmitterParams, spin: str, photon: str, eta: float, xi: float) -> DensityOperator:
    rho = tensor(prepare_initial(params, spin), _vacuum(photon))
    rho = excite(rho, weak_excitation(params, spin, photon), photon)
    rho = apply_channel(rho, loss(eta, photon), (photon,))
    return apply_unitary(rho, instability_phase(xi, spin, photon), (spin, photon))


def herald_state(cfg: ExperimentConfig, xi: float = 0.0) -> tuple[DensityOperator, float]:
    """Unnormalized heralded spin state and success probability; ``xi`` is the relative arm phase."""
    r1 = emitting_node(cfg.node1, SPINS[0], PORTS[0], cfg.transmission, xi)
    r2 = emitting_node(cfg.node2, SPINS[1], PORTS[1], cfg.transmission, 0.0)
    return herald_click(tensor(r1, r2), cfg.detector(), SPINS, PORTS)


def run_entanglement(cfg: ExperimentConfig, xi: float | None = None) -> HeraldOutcome:
    xi = cfg.xi_mean if xi is None else xi
    rho, P_s = herald_state(cfg, xi)
    if P_s <= 0.0:
        return HeraldOutcome(None, 0.0, 0.0)
    t = cfg.attempt_time
    for node, spin, site in cfg.nodes():
        rho = apply_channel(rho, depolarize(t, node.T_d, spin), (spin,))
        rho = apply_unitary(rho, free_evolution(cfg.clock, site, t, spin), (spin,))
    rho4 = rho.renormalize()
    return HeraldOutcome(rho4, P_s, fidelity_pure(rho4, BELL))


# ---------------------------------------------------------------------------
# step 2: free evolution


def run_free_evolution(h: HeraldOutcome, cfg: ExperimentConfig, T: float) -> DensityOperator:
    if not h.succeeded:
        raise ValueError("no heralded state to evolve")
    rho = h.rho4
    for node, spin, site in cfg.nodes():
        # the clock offset varphi is written into node 1's start pulse
        offset = -cfg.varphi if spin == SPINS[0] else 0.0
        rho = apply_unitary(rho, pulse(HALF_PI, node.Omega, node.phi_pi + offset, spin), (spin,))
        rho = apply_unitary(rho, free_evolution(cfg.clock, site, T, spin), (spin,))
        rho = apply_channel(rho, depolarize(T, node.T_d, spin), (spin,))
    return rho


def product_clock_state(cfg: ExperimentConfig, T: float) -> DensityOperator:
    """Both atoms start in ``(|g>+|a>+|b>)/sqrt3`` and evolve independently for ``T``."""
    rho = None
    for node, spin, site in cfg.nodes():
        amp = np.ones(SPIN_DIM, dtype=complex) / math.sqrt(3)
        if spin == SPINS[0]:
            amp[2] *= np.exp(-1j * cfg.varphi)
        r = DensityOperator.pure(HilbertFactorization.of((spin, SPIN_DIM)), amp)
        r = apply_unitary(r, free_evolution(cfg.clock, site, T, spin), (spin,))
        r = apply_channel(r, depolarize(T, node.T_d, spin), (spin,))
        rho = r if rho is None else tensor(rho, r)
    return rho


# ---------------------------------------------------------------------------
# step 3: readout


def _node_readout(rho: DensityOperator, node: EmitterParams, spin: str, early: str, late: str,
                  transmission: float) -> DensityOperator:
    """Closing pulse, early emission, pi pulse, late emission, then loss on both bins."""
    rho = tensor(tensor(rho, _vacuum(early)), _vacuum(late))
    # closing Ramsey pulse: inverse of the opening rotation
    rho = apply_unitary(rho, pulse(HALF_PI, node.Omega, node.phi_pi, spin).dag, (spin,))
    rho = excite(rho, emission_channel(1.0, node.p_c_prime, spin, early), early)
    rho = apply_unitary(rho, pulse(PI, 0.5, node.phi_pi, spin), (spin,))
    rho = excite(rho, emission_channel(1.0, node.p_c_prime, spin, late), late)
    for mode in (early, late):
        rho = apply_channel(rho, loss(transmission, mode), (mode,))
    return rho


def readout_photons(rho6: DensityOperator, cfg: ExperimentConfig) -> DensityOperator:
    """Map the two spins onto early/late photons and propagate them to the station.

    Returns the photonic state on ``(E1, L1, E2, L2)`` after loss, spins traced out.
    """
    rho = rho6
    for (node, spin, _), (e, l) in zip(cfg.nodes(), (MODES[:2], MODES[2:])):
        rho = _node_readout(rho, node, spin, e, l, cfg.transmission)
    return partial_trace(rho, SPINS)


class ReadoutMap:
    """The readout chain as a fixed linear map, for sweeps over many spin states.

    Each node's spin-to-photon channel is tabulated once by pushing a Hermitian
    operator basis through :func:`_node_readout`; the interference and
    detection stage is the slot POVM from :func:`photonics.slot_povm`.
    """

    def __init__(self, cfg: ExperimentConfig, det: DetectorModel):
        self.node_maps = [self._tabulate(node, spin, e, l, cfg.transmission)
                          for (node, spin, _), (e, l) in zip(cfg.nodes(), (MODES[:2], MODES[2:]))]
        self.povm = slot_povm(det)
        self.arm1 = arm1_photons()

    @staticmethod
    def _tabulate(node, spin, early, late, transmission) -> np.ndarray:
        """``T[a, b, i, j]``: photonic output element (a, b) per unit input ``|i><j|``."""
        space = HilbertFactorization.of((spin, SPIN_DIM))

        def out(m):
            rho = DensityOperator(space, m, normalized=False)
            return partial_trace(_node_readout(rho, node, spin, early, late, transmission), [spin]).matrix

        n = SPIN_DIM
        T = np.zeros((4, 4, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    m = np.zeros((n, n), dtype=complex)
                    m[i, i] = 1.0
                    T[:, :, i, i] = out(m)
                    continue
                sym = np.zeros((n, n), dtype=complex)
                sym[i, j] = sym[j, i] = 0.5
                asym = np.zeros((n, n), dtype=complex)
                asym[i, j], asym[j, i] = 0.5j, -0.5j
                a, b = out(sym), out(asym)
                # |i><j| = sym - i*asym, |j><i| = sym + i*asym
                T[:, :, i, j] = a - 1j * b
                T[:, :, j, i] = a + 1j * b
        return T

    def photons(self, rho6: DensityOperator) -> np.ndarray:
        t = rho6.matrix.reshape(SPIN_DIM, SPIN_DIM, SPIN_DIM, SPIN_DIM)
        T1, T2 = self.node_maps
        out = np.einsum("abik,cdjl,ijkl->acbd", T1, T2, t)
        return out.reshape(16, 16)

    def slots(self, rho6: DensityOperator, phases: Sequence[float]) -> np.ndarray:
        """Slot probabilities with phase ``phases[m]`` on arm 1, shape ``(len(phases), 4)``."""
        rho = self.photons(rho6)
        dn = self.arm1[:, None] - self.arm1[None, :]
        out = np.empty((len(phases), 4))
        for m, ph in enumerate(phases):
            r = rho * np.exp(1j * ph * dn)
            out[m] = np.real(np.einsum("ab,sba->s", r, self.povm))
        return out


def run_readout(rho6: DensityOperator, cfg: ExperimentConfig, delta: float,
                xi_prime: float | None = None, number_resolving: bool = False) -> ReadoutProbabilities:
    xi_prime = cfg.xi_prime_mean if xi_prime is None else xi_prime
    return readout_click_probs(readout_photons(rho6, cfg), delta, cfg.detector(number_resolving),
                               xi=xi_prime, modes=MODES)


def simulate_point(cfg: ExperimentConfig, T: float, delta: float, xi: float | None = None,
                   xi_prime: float | None = None) -> ReadoutProbabilities:
    """Reference path for one noise realisation: all three steps, raw click probabilities."""
    h = run_entanglement(cfg, xi)
    if not h.succeeded:
        return ReadoutProbabilities(0.0, 0.0, 0.0, 0.0)
    return run_readout(run_free_evolution(h, cfg, T), cfg, delta, xi_prime)


# ---------------------------------------------------------------------------
# visibility extraction


def fringe_fit(deltas: Sequence[float], p: Sequence[float]) -> tuple[float, complex]:
    """Least-squares ``p(delta) = mean + 2 Re(h e^{i delta})``; returns ``(mean, h)``."""
    d = np.asarray(deltas, dtype=float)
    X = np.stack([np.ones_like(d), np.cos(d), np.sin(d)], axis=1)
    (a, c, s), *_ = np.linalg.lstsq(X, np.asarray(p, dtype=float), rcond=None)
    return float(a), complex(c, -s) / 2


def extract_visibility(deltas: Sequence[float], p: Sequence[float], method: str = "harmonic") -> float:
    """(max - min)/(max + min) of ``p`` over delta.

    ``harmonic`` takes max/min of the fitted first harmonic, exact for the
    single-harmonic fringes this protocol produces; ``grid`` uses the raw
    samples.
    """
    p = np.asarray(p, dtype=float)
    if method == "grid":
        hi, lo = p.max(), p.min()
        return 0.0 if hi + lo <= 0 else float((hi - lo) / (hi + lo))
    if method != "harmonic":
        raise ValueError(f"unknown visibility method {method!r}")
    a, h = fringe_fit(deltas, p)
    return 0.0 if a <= 0 else float(2 * abs(h) / a)


# ---------------------------------------------------------------------------
# Monte-Carlo sweep


@dataclass(frozen=True)
class FringeModel:
    """Slot probabilities as ``Re sum_{k,m} C[k,m,s] e^{i k xi} e^{i m phi}``."""

    coeffs: np.ndarray
    xi_orders: np.ndarray
    phi_orders: np.ndarray

    @classmethod
    def build(cls, spins_for_xi: Callable[[float], DensityOperator | None], readout: ReadoutMap,
              xi_values: Sequence[float] | None) -> "FringeModel":
        """``xi_values=None`` decomposes over a full xi grid; a single value freezes xi."""
        xs = [2 * math.pi * j / XI_GRID for j in range(XI_GRID)] if xi_values is None else list(xi_values)
        phis = [2 * math.pi * m / PHI_GRID for m in range(PHI_GRID)]
        S = np.zeros((len(xs), PHI_GRID, 4))
        for j, x in enumerate(xs):
            rho6 = spins_for_xi(x)
            if rho6 is not None:
                S[j] = readout.slots(rho6, phis)
        C = np.fft.fft2(S, axes=(0, 1)) / (len(xs) * PHI_GRID)
        k = np.rint(np.fft.fftfreq(len(xs)) * len(xs)).astype(int) if xi_values is None else np.zeros(1, int)
        m = np.rint(np.fft.fftfreq(PHI_GRID) * PHI_GRID).astype(int)
        return cls(C, k, m)

    def mean_slots(self, xi: np.ndarray, xi_prime: np.ndarray, deltas: np.ndarray) -> np.ndarray:
        """Trial-averaged slot probabilities, shape ``(len(deltas), 4)``."""
        W = np.exp(1j * (np.outer(xi, self.xi_orders)[:, :, None]
                         + np.outer(xi_prime, self.phi_orders)[:, None, :])).mean(axis=0)
        E = np.exp(1j * np.outer(deltas, self.phi_orders))
        return np.real(np.einsum("km,kms,dm->ds", W, self.coeffs, E))

    def slots(self, xi: float, phase: float) -> np.ndarray:
        ek = np.exp(1j * self.xi_orders * xi)
        em = np.exp(1j * self.phi_orders * phase)
        return np.real(np.einsum("k,kms,m->s", ek, self.coeffs, em))


def noise_draws(cfg: ExperimentConfig, t_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Relative heralding phase and relative readout phase for every trial at one ``T``."""
    z = rng.trial_normals(cfg.seed, t_index, cfg.trials)
    if cfg.independent_arm_phases:
        xi = cfg.xi_std * (z[:, 0] - z[:, 2])
        xip = cfg.xi_prime_std * (z[:, 1] - z[:, 3])
    else:
        xi = cfg.xi_mean + cfg.xi_std * z[:, 0]
        xip = cfg.xi_prime_mean + cfg.xi_prime_std * z[:, 1]
    return xi, xip


def _shot_sample(cfg: ExperimentConfig, t_index: int, slots: np.ndarray) -> np.ndarray:
    g = np.random.Generator(np.random.Philox(key=rng.stream_key(cfg.seed, t_index) ^ (1 << 127)))
    out = np.empty_like(slots)
    for i, p in enumerate(slots):
        pv = np.clip(np.append(p, 1.0 - p.sum()), 0.0, None)
        out[i] = g.multinomial(cfg.shots, pv / pv.sum())[:4] / cfg.shots
    return out


def _visibility_from_slots(deltas: np.ndarray, slots: np.ndarray, method: str):
    p_plus = slots[:, 0] + slots[:, 2]
    p_click = float(slots.sum(axis=1).mean())
    if p_click <= 0:
        return 0.0, p_click, float("nan"), 0.0, True
    a, h = fringe_fit(deltas, p_plus)
    nu = extract_visibility(deltas, p_plus, method)
    at0 = (a + 2 * h.real) / p_click
    return nu, p_click, at0, 2 * abs(h), False


def _batched_nu(model: FringeModel, xi, xip, deltas, method, n_batches=16) -> float:
    n = len(xi)
    if n < 2:
        return 0.0
    nb = min(n_batches, n)
    vals = [_visibility_from_slots(deltas, model.mean_slots(xi[idx], xip[idx], deltas), method)[0]
            for idx in np.array_split(np.arange(n), nb)]
    return float(np.std(vals, ddof=1) / math.sqrt(nb))


def visibility_curve(cfg: ExperimentConfig, postselected: bool = False,
                     method: str = "harmonic") -> list[VisibilityPoint]:
    deltas = np.asarray(cfg.deltas)
    xi_values = None if cfg.xi_std > 0 else [0.0 if cfg.independent_arm_phases else cfg.xi_mean]
    heralds = {}

    def herald(x: float) -> HeraldOutcome:
        if x not in heralds:
            heralds[x] = run_entanglement(cfg, x)
        return heralds[x]

    P_s = run_entanglement(cfg).P_s
    readout = ReadoutMap(cfg, cfg.detector())
    readout_ps = ReadoutMap(cfg, cfg.detector(number_resolving=True)) if postselected else None
    points = []
    for t_idx, T in enumerate(cfg.times):
        def spins(x: float, T=T):
            h = herald(x)
            return run_free_evolution(h, cfg, T) if h.succeeded else None

        model = FringeModel.build(spins, readout, xi_values)
        xi, xip = noise_draws(cfg, t_idx)
        if xi_values is not None:
            xi = np.zeros_like(xi)  # xi frozen inside the model
        slots = model.mean_slots(xi, xip, deltas)
        if cfg.shots:
            slots = _shot_sample(cfg, t_idx, slots)
        nu, p_click, at0, amp, degenerate = _visibility_from_slots(deltas, slots, method)
        nu_std = _batched_nu(model, xi, xip, deltas, method)
        extra = {}
        if postselected:
            ps_state = product_clock_state(cfg, T)
            ps_model = FringeModel.build(lambda _x: ps_state, readout_ps, [0.0])
            ps_slots = ps_model.mean_slots(np.zeros_like(xip), xip, deltas)
            nu_ps, p_sel, *_ = _visibility_from_slots(deltas, ps_slots, method)
            extra = dict(nu_ps=nu_ps, p_select=p_sel, lambda_gap=nu_ps - nu)
        points.append(VisibilityPoint(T=T, nu=nu, nu_std=nu_std, P_s=P_s, p_plus_at_delta0=at0,
                                      p_click=p_click, raw_amplitude=amp, degenerate=degenerate,
                                      **extra))
    return points


# ---------------------------------------------------------------------------
# product-state variant, reference path


def entangled_visibility(cfg: ExperimentConfig, T: float, method: str = "harmonic") -> float:
    """Noise phases at their means; reference pipeline over the delta grid."""
    h = run_entanglement(cfg)
    if not h.succeeded:
        return 0.0
    rho_ph = readout_photons(run_free_evolution(h, cfg, T), cfg)
    det = cfg.detector()
    p = [readout_click_probs(rho_ph, d, det, cfg.xi_prime_mean, MODES).p_plus_total for d in cfg.deltas]
    return extract_visibility(cfg.deltas, p, method)


def run_postselected(cfg: ExperimentConfig, T: float, method: str = "harmonic") -> PostselectedResult:
    """Product-state start, same readout chain, post-selection on a single detected photon."""
    rho_ph = readout_photons(product_clock_state(cfg, T), cfg)
    det = cfg.detector(number_resolving=True)
    probs = [readout_click_probs(rho_ph, d, det, cfg.xi_prime_mean, MODES) for d in cfg.deltas]
    p_plus = [p.p_plus_total for p in probs]
    p_select = float(np.mean([p.p_click for p in probs]))
    nu_ps = extract_visibility(cfg.deltas, p_plus, method)
    return PostselectedResult(nu_ps, p_select, nu_ps - entangled_visibility(cfg, T, method))


# ---------------------------------------------------------------------------
# helpers


def balance_epsilon(eps1: float, eta_arm1: float, eta_arm2: float, node1: EmitterParams | None = None,
                    node2: EmitterParams | None = None, eta_d: float = 1.0, tol: float = 1e-12) -> float:
    """Excitation probability of node 2 that equalises single-photon detection rates."""
    n1 = node1 or EmitterParams()
    n2 = node2 or EmitterParams()

    def rate(eps, node, eta):
        return node.eta_i * eps * node.p_c * eta * eta_d

    target = rate(eps1, n1, eta_arm1)
    f = lambda e: rate(e, n2, eta_arm2) - target  # noqa: E731
    if f(1.0) < 0:
        raise ValueError("node 2 cannot match node 1 even at epsilon = 1")
    if f(0.0) >= 0:
        return 0.0
    return brentq(f, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps)


def fringe_period(T: Sequence[float], nu: Sequence[float]) -> float:
    """Fringe period from the positions of the visibility minima.

    A coarse period from the strongest Fourier component of ``nu**2`` sets the
    minimum spacing between accepted minima, so Monte-Carlo ripple does not
    register as fringes. Each minimum is refined with a parabola and the period
    is the least-squares slope of position against index. ``T`` is assumed
    uniformly spaced.
    """
    T = np.asarray(T, dtype=float)
    y = np.asarray(nu, dtype=float) ** 2
    if len(y) < 3 or np.ptp(y) == 0:
        return float("nan")
    spec = np.abs(np.fft.rfft(y - y.mean()))
    k = int(np.argmax(spec[1:])) + 1
    distance = max(1, int(0.6 * len(y) / k))
    idx, _ = find_peaks(-y, distance=distance)
    mins = []
    for i in idx:
        denom = y[i - 1] - 2 * y[i] + y[i + 1]
        off = 0.5 * (y[i - 1] - y[i + 1]) / denom if denom > 0 else 0.0
        mins.append(T[i] + off * (T[i + 1] - T[i]))
    if len(mins) < 2:
        return float("nan")
    return float(np.polyfit(np.arange(len(mins)), mins, 1)[0])
