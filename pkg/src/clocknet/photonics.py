"""Photonic modes: loss, phase noise, the central beam splitter and click detection.

Each node feeds one input port of a balanced beam splitter.  Input ports carry
at most one photon, so output ports need at most two (the Hong-Ou-Mandel
term).  Output port 1 is detector ``d+`` and port 2 is ``d-``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .emitter import A, G, SPIN_DIM
from .qlinalg import (DensityOperator, HilbertFactorization, KrausChannel, Operator,
                      apply_unitary, embed_levels, partial_trace, project)

OUT_DIM = 3  # 0, 1 or 2 photons per output port


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detector with efficiency ``eta_d`` and no dark counts.

    ``number_resolving`` is off for the physical detectors; it exists only for
    the product-state analysis, which must separate one- from two-photon events.
    """

    eta_d: float = 1.0
    time_bin_resolving: bool = True
    number_resolving: bool = False

    def __post_init__(self):
        if not 0.0 <= self.eta_d <= 1.0:
            raise ValueError(f"eta_d={self.eta_d} outside [0, 1]")

    def click_probability(self, n: int) -> float:
        """Probability that a threshold detector fires on ``n`` incident photons."""
        return 1.0 - (1.0 - self.eta_d) ** n

    def count_probability(self, n: int, k: int) -> float:
        """Probability that exactly ``k`` of ``n`` photons are registered."""
        if k > n:
            return 0.0
        return math.comb(n, k) * self.eta_d**k * (1.0 - self.eta_d) ** (n - k)


@dataclass(frozen=True)
class ReadoutProbabilities:
    """Raw single-click probabilities per detector and time bin.

    ``p_click`` is the total probability of the post-selected event (exactly
    one detector firing in exactly one bin).
    """

    p_plus_early: float
    p_minus_early: float
    p_plus_late: float
    p_minus_late: float

    @property
    def p_plus_total(self) -> float:
        return self.p_plus_early + self.p_plus_late

    @property
    def p_minus_total(self) -> float:
        return self.p_minus_early + self.p_minus_late

    @property
    def p_click(self) -> float:
        return self.p_plus_total + self.p_minus_total

    def normalized(self) -> "ReadoutProbabilities":
        s = self.p_click
        if s <= 0:
            return ReadoutProbabilities(0.0, 0.0, 0.0, 0.0)
        return ReadoutProbabilities(self.p_plus_early / s, self.p_minus_early / s,
                                    self.p_plus_late / s, self.p_minus_late / s)

    def as_array(self) -> np.ndarray:
        return np.array([self.p_plus_early, self.p_minus_early, self.p_plus_late, self.p_minus_late])


def loss(eta: float, photon: str = "photon") -> KrausChannel:
    """Fictitious beam splitter of transmission ``eta`` with the environment traced out."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission {eta} outside [0, 1]")
    space = HilbertFactorization.of((photon, 2))
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(eta)]])
    k1 = np.array([[0.0, math.sqrt(1.0 - eta)], [0.0, 0.0]])
    return KrausChannel((Operator(space, k0), Operator(space, k1)))


def instability_phase(xi: float, spin: str = "spin", photon: str = "photon") -> Operator:
    """``I - (1 - e^{i xi}) |g,1><g,1|`` on one node's spin (x) photon factor."""
    m = np.eye(2 * SPIN_DIM, dtype=complex)
    i = 2 * G + 1
    m[i, i] = np.exp(1j * xi)
    return Operator(HilbertFactorization.of((spin, SPIN_DIM), (photon, 2)), m)


def photon_phase(phi: float, photon: str = "photon", dim: int = 2) -> Operator:
    """Phase ``e^{i n phi}`` on the n-photon component of a single mode."""
    return Operator(HilbertFactorization.of((photon, dim)), np.diag(np.exp(1j * phi * np.arange(dim))))


def _bs_matrix() -> np.ndarray:
    """Two-mode 50:50 splitter on the truncated (0..2) x (0..2) Fock space.

    Creation operators map as ``a1+ -> (b1+ + b2+)/sqrt2``, ``a2+ -> (b1+ - b2+)/sqrt2``.
    Total photon number <= 2 is mapped exactly; the unreachable n >= 3 states
    are left as they are so the matrix is unitary.
    """
    d = OUT_DIM
    U = np.zeros((d * d, d * d), dtype=complex)
    for n1, n2 in product(range(d), range(d)):
        col = n1 * d + n2
        if n1 + n2 > 2:
            U[col, col] = 1.0
            continue
        # expand (b1+ + b2+)^n1 (b1+ - b2+)^n2 / sqrt(2^(n1+n2) n1! n2!) |0,0>
        norm = 1.0 / math.sqrt(2 ** (n1 + n2) * math.factorial(n1) * math.factorial(n2))
        for k1 in range(n1 + 1):
            for k2 in range(n2 + 1):
                m1 = k1 + k2
                m2 = (n1 - k1) + (n2 - k2)
                coeff = math.comb(n1, k1) * math.comb(n2, k2) * (-1) ** (n2 - k2)
                U[m1 * d + m2, col] += norm * coeff * math.sqrt(math.factorial(m1) * math.factorial(m2))
    return U


_BS = _bs_matrix()


def central_beam_splitter(port1: str = "port1", port2: str = "port2") -> Operator:
    return Operator(HilbertFactorization.of((port1, OUT_DIM), (port2, OUT_DIM)), _BS)


def _fock_projector(port1: str, port2: str, n1: int, n2: int) -> Operator:
    m = np.zeros((OUT_DIM**2, OUT_DIM**2), dtype=complex)
    i = n1 * OUT_DIM + n2
    m[i, i] = 1.0
    return Operator(HilbertFactorization.of((port1, OUT_DIM), (port2, OUT_DIM)), m)


def interfere(rho: DensityOperator, port1: str, port2: str) -> DensityOperator:
    """Pad both input ports to the output truncation and apply the beam splitter."""
    for p in (port1, port2):
        if rho.space.dim_of(p) != 2:
            raise ValueError(f"beam splitter input {p!r} must be truncated to {{0, 1}} photons")
    rho = embed_levels(embed_levels(rho, port1, OUT_DIM), port2, OUT_DIM)
    return apply_unitary(rho, central_beam_splitter(port1, port2), (port1, port2))


def herald_click(rho_in: DensityOperator, det: DetectorModel,
                 spins: tuple[str, str] = ("s1", "s2"),
                 ports: tuple[str, str] = ("p1", "p2")) -> tuple[DensityOperator, float]:
    """Single-click heralding at the central station.

    Returns the unnormalized spin state conditioned on exactly one detector
    firing (a port-2 click is followed by a pi phase on ``|a>`` of the second
    spin) and its trace, the success probability.
    """
    p1, p2 = ports
    out = interfere(rho_in, p1, p2)
    u_pi = np.eye(SPIN_DIM, dtype=complex)
    u_pi[A, A] = -1.0
    u_pi = Operator(HilbertFactorization.of((spins[1], SPIN_DIM)), u_pi)
    acc = None
    for n in (1, 2):
        w = det.click_probability(n)
        if w == 0.0:
            continue
        for n1, n2, correct in ((n, 0, False), (0, n, True)):
            branch = project(out, _fock_projector(p1, p2, n1, n2), (p1, p2))
            if correct:
                branch = apply_unitary(branch, u_pi, (spins[1],))
            branch = partial_trace(branch, [p1, p2]).scaled(w)
            acc = branch if acc is None else acc + branch
    if acc is None:
        acc = partial_trace(out, [p1, p2]).scaled(0.0)
    acc = DensityOperator(acc.space, acc.matrix, normalized=False)
    return acc, acc.trace


def slot_distribution(rho_ph: DensityOperator, delta: float, xi: float = 0.0,
                      modes: tuple[str, str, str, str] = ("E1", "L1", "E2", "L2")) -> np.ndarray:
    """Joint photon-number distribution ``p[n+E, n-E, n+L, n-L]`` at the detectors.

    ``delta + xi`` is imposed on arm 1 (both time bins), then each bin is
    interfered on the central beam splitter.
    """
    e1, l1, e2, l2 = modes
    rho = apply_unitary(rho_ph, photon_phase(delta + xi, e1), (e1,))
    rho = apply_unitary(rho, photon_phase(delta + xi, l1), (l1,))
    rho = interfere(rho, e1, e2)
    rho = interfere(rho, l1, l2)
    order = [rho.space.index(m) for m in (e1, e2, l1, l2)]
    diag = np.real(np.diag(rho.matrix)).reshape(rho.space.dims)
    return np.clip(np.transpose(diag, order), 0.0, None)


def slot_probabilities(dist: np.ndarray, det: DetectorModel) -> np.ndarray:
    """Probability that slot k alone registers an event, for slots (+E, -E, +L, -L)."""
    n = np.arange(OUT_DIM)
    if det.number_resolving:
        hit = np.array([det.count_probability(k, 1) for k in n])
        quiet = np.array([det.count_probability(k, 0) for k in n])
    else:
        hit = np.array([det.click_probability(k) for k in n])
        quiet = 1.0 - hit
    out = np.zeros(4)
    for s in range(4):
        factors = [hit if k == s else quiet for k in range(4)]
        out[s] = np.einsum("abcd,a,b,c,d->", dist, *factors)
    return out


def readout_click_probs(rho_ph: DensityOperator, delta: float, det: DetectorModel,
                        xi: float = 0.0,
                        modes: tuple[str, str, str, str] = ("E1", "L1", "E2", "L2")) -> ReadoutProbabilities:
    if not det.time_bin_resolving:
        raise ValueError("readout needs detectors that separate early and late clicks")
    dist = slot_distribution(rho_ph, delta, xi, modes)
    return ReadoutProbabilities(*slot_probabilities(dist, det))


def slot_povm(det: DetectorModel) -> np.ndarray:
    """Heisenberg-picture slot operators on ``(E1, L1, E2, L2)``, shape ``(4, 16, 16)``.

    ``Tr(rho Q[s])`` is slot ``s`` of :func:`slot_probabilities` for a photonic
    state with no extra arm phase; each mode is truncated to {0, 1}.
    """
    if det.number_resolving:
        hit = np.array([det.count_probability(k, 1) for k in range(OUT_DIM)])
        quiet = np.array([det.count_probability(k, 0) for k in range(OUT_DIM)])
    else:
        hit = np.array([det.click_probability(k) for k in range(OUT_DIM)])
        quiet = 1.0 - hit
    # amplitude map (e1, l1, e2, l2) -> (n+E, n-E, n+L, n-L)
    V = np.zeros((OUT_DIM,) * 4 + (2,) * 4, dtype=complex)
    bs = _BS.reshape((OUT_DIM,) * 4)  # [out+, out-, in1, in2]
    for e1, l1, e2, l2 in product(range(2), repeat=4):
        V[..., e1, l1, e2, l2] = np.einsum("ab,cd->abcd", bs[:, :, e1, e2], bs[:, :, l1, l2])
    V = V.reshape(OUT_DIM**4, 16)
    Q = np.zeros((4, 16, 16), dtype=complex)
    for s in range(4):
        factors = [hit if k == s else quiet for k in range(4)]
        w = np.einsum("a,b,c,d->abcd", *factors).reshape(-1)
        Q[s] = V.conj().T @ (w[:, None] * V)
    return Q


def arm1_photons() -> np.ndarray:
    """Photon number in arm 1 (E1 + L1) for each basis index of ``(E1, L1, E2, L2)``."""
    n = np.array(list(product(range(2), repeat=4)))
    return n[:, 0] + n[:, 1]
