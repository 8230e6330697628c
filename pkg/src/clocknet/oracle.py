"""Closed-form and brute-force references for the simulator.

Nothing in here touches :mod:`clocknet.qlinalg` or the photonics pipeline: the
formulas are scalar trigonometry, explicit small matrices, or hand-enumerated
amplitude bookkeeping, so a shared bug cannot make simulator and reference agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .photonics import ReadoutProbabilities
from .spacetime import PhaseBundle


@dataclass(frozen=True)
class ClockState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("clock state must have unit norm")
        object.__setattr__(self, "amplitudes", v)

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    @classmethod
    def two_level(cls, theta: float) -> "ClockState":
        """``(|a> + e^{-i theta}|b>)/sqrt2``."""
        return cls(np.array([1.0, np.exp(-1j * theta)]) / math.sqrt(2))


def matterwave_visibility(delta_omega: float, tau1: float, tau2: float) -> float:
    return abs(math.cos(delta_omega * (tau1 - tau2) / 2.0))


def overlap(c1: ClockState, c2: ClockState) -> tuple[float, float]:
    """``<c1|c2> = |.| e^{-i lam}``; ``lam = 0`` for vanishing overlap."""
    ov = np.vdot(c1.amplitudes, c2.amplitudes)
    mag = abs(ov)
    return float(mag), (0.0 if mag < 1e-12 else float(-np.angle(ov)))


# ---------------------------------------------------------------------------
# presence/absence POVM on (no-clock + n clock levels) per site


def povm_operators(n: int, delta: float) -> dict[str, np.ndarray]:
    """The four POVM elements on the ((1+n) x (1+n))-dim two-site space.

    Local basis: index 0 is the no-clock state, 1..n are the clock levels.
    """
    d = n + 1
    eye = np.eye(d)

    def ket(i):
        return eye[:, i]

    def op(a, b, c, e):
        # |a><b| (x) |c><e|
        return np.kron(np.outer(ket(a), ket(b)), np.outer(ket(c), ket(e)))

    nn = op(0, 0, 0, 0).astype(complex)
    cc = sum(op(k, k, l, l) for k in range(1, d) for l in range(1, d)).astype(complex)
    plus = np.zeros((d * d, d * d), dtype=complex)
    minus = np.zeros_like(plus)
    for k in range(1, d):
        diag = op(0, 0, k, k) + op(k, k, 0, 0)
        cross = np.exp(1j * delta) * op(0, k, k, 0) + np.exp(-1j * delta) * op(k, 0, 0, k)
        plus += 0.5 * (diag + cross)
        minus += 0.5 * (diag - cross)
    return {"plus": plus, "minus": minus, "nn": nn, "cc": cc}


def nonlocal_clock_state(c1: ClockState, c2: ClockState, delta_phi: float) -> np.ndarray:
    """``(|nc>|c2> + e^{i dPhi}|c1>|nc>)/sqrt2`` on the two-site space."""
    if c1.n != c2.n:
        raise ValueError("clock states must have equal dimension")
    nc = np.zeros(c1.n + 1, dtype=complex)
    nc[0] = 1.0
    e1 = np.concatenate([[0.0], c1.amplitudes])
    e2 = np.concatenate([[0.0], c2.amplitudes])
    return (np.kron(nc, e2) + np.exp(1j * delta_phi) * np.kron(e1, nc)) / math.sqrt(2)


def povm_expectation(c1: ClockState, c2: ClockState, delta: float, delta_phi: float) -> tuple[float, float]:
    """Closed form ``1/2 +- 1/2 |<c1|c2>| cos(delta + dPhi + lam)``."""
    mag, lam = overlap(c1, c2)
    x = 0.5 * mag * math.cos(delta + delta_phi + lam)
    return 0.5 + x, 0.5 - x


def povm_expectation_explicit(c1: ClockState, c2: ClockState, delta: float,
                              delta_phi: float) -> tuple[float, float]:
    psi = nonlocal_clock_state(c1, c2, delta_phi)
    ops = povm_operators(c1.n, delta)
    return (float(np.real(np.vdot(psi, ops["plus"] @ psi))),
            float(np.real(np.vdot(psi, ops["minus"] @ psi))))


# ---------------------------------------------------------------------------
# entangled-clock readout


def ideal_readout_probs(b: PhaseBundle) -> ReadoutProbabilities:
    x = np.exp(1j * (b.theta + b.theta0 + b.delta))
    e1, e2 = np.exp(-1j * b.theta1), np.exp(-1j * b.theta2)
    pe = [abs(1 + e2 + s * x * (1 + e1)) ** 2 / 16 for s in (1, -1)]
    pl = [abs(1 - e2 + s * x * (1 - e1)) ** 2 / 16 for s in (1, -1)]
    return ReadoutProbabilities(pe[0], pe[1], pl[0], pl[1])


def readout_totals(b: PhaseBundle) -> tuple[float, float]:
    """Trigonometric form of the early+late totals.

    The second cosine carries ``theta2 - theta1``: that is what the per-bin
    probabilities sum to.
    """
    x = b.delta + b.theta + b.theta0
    s = math.cos(x) + math.cos(x - b.theta1 + b.theta2)
    return 0.5 + s / 4, 0.5 - s / 4


def ideal_visibility(clock_difference: float) -> float:
    """``cos^2(dtheta/2)``: the squared clock overlap."""
    return math.cos(clock_difference / 2.0) ** 2


def fringe_visibility(clock_difference: float) -> float:
    """``(max - min)/(max + min)`` of the readout totals over delta: ``|cos(dtheta/2)|``."""
    return abs(math.cos(clock_difference / 2.0))


def sweep_visibility(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    hi, lo = p.max(), p.min()
    return 0.0 if hi + lo <= 0 else float((hi - lo) / (hi + lo))


# ---------------------------------------------------------------------------
# product-state (post-selected) variant


def postselected_visibility(c1: ClockState, c2: ClockState,
                            g_phases: tuple[float, float] = (0.0, 0.0)) -> tuple[float, float]:
    """Visibility and probability of the one-clock branch for the product start state.

    Each atom is ``(e^{-i g}|g> + sqrt2 |c>)/sqrt3`` with ``|c>`` in span{a, b}.
    """
    if c1.n != 2 or c2.n != 2:
        raise ValueError("product-state variant uses two-level clocks")
    atoms = []
    for c, gph in zip((c1, c2), g_phases):
        atoms.append(np.concatenate([[np.exp(-1j * gph)], math.sqrt(2) * c.amplitudes]) / math.sqrt(3))
    psi = np.kron(atoms[0], atoms[1])
    vals = []
    for d in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2):
        ops = povm_operators(2, d)
        vals.append(float(np.real(np.vdot(psi, ops["plus"] @ psi))))
    ops = povm_operators(2, 0.0)
    p_sel = float(np.real(np.vdot(psi, (ops["plus"] + ops["minus"]) @ psi)))
    mean = 0.5 * (vals[0] + vals[2])
    amp = 0.5 * math.hypot(vals[0] - vals[2], vals[3] - vals[1])
    return (amp / mean if mean > 0 else 0.0), p_sel


# ---------------------------------------------------------------------------
# heralding by explicit branch enumeration

_BS_MAP = {
    (0, 0): {(0, 0): 1.0},
    (1, 0): {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)},
    (0, 1): {(1, 0): 1 / math.sqrt(2), (0, 1): -1 / math.sqrt(2)},
    (1, 1): {(2, 0): 1 / math.sqrt(2), (0, 2): -1 / math.sqrt(2)},
}
_G, _A, _B = 0, 1, 2


def _node_branches(eps, p_c, eta_i, eta, xi):
    """Mixture of pure node branches as ``(weight, {(spin, n_photon): amplitude})``."""
    out = [((1 - eta_i) / 2, {(_G, 0): 1.0}), ((1 - eta_i) / 2, {(_B, 0): 1.0})]
    coherent = {(_A, 0): math.sqrt(1 - eps), (_G, 1): math.sqrt(eps * p_c * eta) * np.exp(1j * xi)}
    out.append((eta_i, coherent))
    out.append((eta_i * eps * p_c * (1 - eta), {(_G, 0): 1.0}))  # photon lost to the environment
    for k in (_G, _A, _B):
        out.append((eta_i * eps * (1 - p_c) / 3, {(k, 0): 1.0}))
    return [(w, amp) for w, amp in out if w > 0]


@dataclass(frozen=True)
class HeraldEnumeration:
    P_s: float
    rho: np.ndarray  # unnormalized 9x9 heralded spin state, ordering (s1, s2)
    bell_weight: float


def herald_enumeration(eps1: float, eps2: float, p_c: float = 1.0, eta_i: float = 1.0,
                       eta_o: float = 1.0, eta_t: float = 1.0, eta_d: float = 1.0,
                       xi1: float = 0.0, xi2: float = 0.0,
                       eta_t2: float | None = None) -> HeraldEnumeration:
    """Sum the single-click probability over every joint emission/loss branch."""
    eta1 = eta_o * eta_t
    eta2 = eta_o * (eta_t if eta_t2 is None else eta_t2)
    click = {1: eta_d, 2: eta_d**2 + 2 * eta_d * (1 - eta_d)}
    rho = np.zeros((9, 9), dtype=complex)
    for (w1, b1), (w2, b2) in product(_node_branches(eps1, p_c, eta_i, eta1, xi1),
                                      _node_branches(eps2, p_c, eta_i, eta2, xi2)):
        # output-port amplitudes -> spin vector
        out: dict[tuple[int, int], np.ndarray] = {}
        for ((s1, n1), a1), ((s2, n2), a2) in product(b1.items(), b2.items()):
            for ports, c in _BS_MAP[(n1, n2)].items():
                v = out.setdefault(ports, np.zeros(9, dtype=complex))
                v[3 * s1 + s2] += a1 * a2 * c
        for (m1, m2), v in out.items():
            if (m1 == 0) == (m2 == 0):
                continue  # no click, or both detectors exposed
            n = m1 + m2
            if m2:
                v = v.copy()
                v[[3 * s + _A for s in range(3)]] *= -1.0  # pi phase on |a> of atom 2
            rho += w1 * w2 * click[n] * np.outer(v, v.conj())
    bell = np.zeros(9)
    bell[3 * _G + _A] = bell[3 * _A + _G] = 1 / math.sqrt(2)
    P_s = float(np.real(np.trace(rho)))
    return HeraldEnumeration(P_s, rho, float(np.real(bell @ rho @ bell)))
