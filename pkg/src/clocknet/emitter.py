"""Single atomic node: preparation, photon emission, pulses, free evolution, depolarization.

The spin factor is three-dimensional with the fixed ordering ``g=0, a=1, b=2``.
Photonic factors attached to a node are truncated to {0, 1} photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qlinalg import DensityOperator, HilbertFactorization, KrausChannel, Operator, apply_channel
from .spacetime import ClockSpec, SiteWorldline, level_phase

G, A, B = 0, 1, 2
SPIN_DIM = 3
LEVEL_NAMES = ("g", "a", "b")

HALF_PI = "half_pi"
PI = "pi"


@dataclass(frozen=True)
class EmitterParams:
    eta_i: float = 1.0
    epsilon: float = 0.1
    p_c: float = 1.0
    p_c_prime: float = 1.0
    Omega: float = 0.5
    phi_pi: float = 0.0
    T_d: float = math.inf
    T_c: float = 0.0

    def __post_init__(self):
        for name in ("eta_i", "epsilon", "p_c", "p_c_prime", "Omega"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if not self.T_d > 0:
            raise ValueError(f"T_d={self.T_d} must be positive")
        if not self.T_c >= 0:
            raise ValueError(f"T_c={self.T_c} must be non-negative")


def _spin_space(spin: str) -> HilbertFactorization:
    return HilbertFactorization.of((spin, SPIN_DIM))


def _ket(i: int, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


def prepare_initial(params: EmitterParams, spin: str = "spin") -> DensityOperator:
    w = (1.0 - params.eta_i) / 2.0
    return DensityOperator(_spin_space(spin), np.diag([w, params.eta_i, w]))


def _flatten_ops(weight: float, source: int) -> list[np.ndarray]:
    """Kraus branches sending a fraction ``weight`` of level ``source`` to the mixture I/3."""
    ops = []
    for k in range(SPIN_DIM):
        m = np.zeros((SPIN_DIM, SPIN_DIM), dtype=complex)
        m[k, source] = math.sqrt(weight / 3.0)
        ops.append(m)
    return ops


def noise_flatten(weight: float, source: int = A, spin: str = "spin") -> KrausChannel:
    """Replace a fraction ``weight`` of the population of ``source`` by an equal mixture of g, a, b.

    Coherences of ``source`` with the other levels shrink by ``sqrt(1 - weight)``.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight outside [0, 1]")
    keep = np.eye(SPIN_DIM, dtype=complex)
    keep[source, source] = math.sqrt(1.0 - weight)
    space = _spin_space(spin)
    ops = [Operator(space, keep)] + [Operator(space, m) for m in _flatten_ops(weight, source)]
    return KrausChannel(tuple(ops))


def emission_channel(epsilon: float, p_collect: float, spin: str = "spin",
                     photon: str = "photon") -> KrausChannel:
    """``|a,0> -> sqrt(eps)(sqrt(1-p)|o,0> + sqrt(p)|g,1>) + sqrt(1-eps)|a,0>`` with |o> -> I/3.

    Acts on spin (x) photon; the photon factor must start in vacuum.  Inputs
    already holding a photon are passed through unchanged (and decohered from
    the vacuum sector), which keeps the Kraus set complete.
    """
    space = HilbertFactorization.of((spin, SPIN_DIM), (photon, 2))

    def idx(s, n):
        return 2 * s + n

    coherent = np.zeros((6, 6), dtype=complex)
    coherent[idx(G, 0), idx(G, 0)] = 1.0
    coherent[idx(B, 0), idx(B, 0)] = 1.0
    coherent[idx(A, 0), idx(A, 0)] = math.sqrt(1.0 - epsilon)
    coherent[idx(G, 1), idx(A, 0)] = math.sqrt(epsilon * p_collect)
    passthrough = np.zeros((6, 6), dtype=complex)
    for s in range(SPIN_DIM):
        passthrough[idx(s, 1), idx(s, 1)] = 1.0
    vac = np.diag([1.0, 0.0]).astype(complex)
    noise = [np.kron(m, vac) for m in _flatten_ops(epsilon * (1.0 - p_collect), A)]
    ops = [coherent, passthrough] + noise
    return KrausChannel(tuple(Operator(space, m) for m in ops))


def weak_excitation(params: EmitterParams, spin: str = "spin", photon: str = "photon") -> KrausChannel:
    return emission_channel(params.epsilon, params.p_c, spin, photon)


def excite(rho: DensityOperator, channel: KrausChannel, photon: str) -> DensityOperator:
    """Apply an emission channel after checking that ``photon`` is empty."""
    i = rho.space.index(photon)
    dims = rho.space.dims
    diag = np.real(np.diag(rho.matrix)).reshape(dims)
    occupied = np.take(diag, 1, axis=i).sum()
    if occupied > 1e-12:
        raise ValueError(f"photon factor {photon!r} is not in vacuum (population {occupied:.3e})")
    return apply_channel(rho, channel, channel.space.labels)


def pulse(kind: str, Omega: float = 0.5, phi_pi: float = 0.0, spin: str = "spin") -> Operator:
    """Rotation in span{a, b}; identity on g.

    ``half_pi``: ``|a> -> sqrt(Omega)|a> + sqrt(1-Omega) e^{i phi}|b>``.
    ``pi``: ``|b> -> |a>`` and ``|a> -> -e^{i phi}|b>`` (a full rotation).
    """
    if not 0.0 <= Omega <= 1.0:
        raise ValueError("Omega outside [0, 1]")
    if kind == HALF_PI:
        c, s = math.sqrt(Omega), math.sqrt(1.0 - Omega)
    elif kind == PI:
        c, s = 0.0, 1.0
    else:
        raise ValueError(f"unknown pulse kind {kind!r}")
    e = np.exp(1j * phi_pi)
    m = np.eye(SPIN_DIM, dtype=complex)
    m[A, A] = c
    m[B, A] = s * e
    m[A, B] = -s * np.conj(e)
    m[B, B] = c
    if kind == PI:
        m[A, B] = np.conj(e)
        m[B, A] = -e
    return Operator(_spin_space(spin), m)


def free_evolution(clock: ClockSpec, site: SiteWorldline, T: float, spin: str = "spin") -> Operator:
    # chained from level splittings so that the a/b phase uses delta_omega exactly
    pg = level_phase(clock.omega_g, site, T)
    pa = pg + level_phase(clock.omega_a - clock.omega_g, site, T)
    pb = pa + level_phase(clock.delta_omega, site, T)
    phases = [pg, pa, pb]
    return Operator(_spin_space(spin), np.diag(np.exp(-1j * np.array(phases))))


def depolarization_probability(T_elapsed: float, T_d: float) -> float:
    if T_elapsed < 0:
        raise ValueError("elapsed time must be non-negative")
    if math.isinf(T_d):
        return 0.0
    return -math.expm1(-T_elapsed / T_d)


def depolarize(T_elapsed: float, T_d: float, spin: str = "spin") -> KrausChannel:
    """Replacement channel ``rho -> (1-p) rho + p I/3 (x) Tr_spin(rho)``, ``p = 1 - exp(-t/T_d)``."""
    p = depolarization_probability(T_elapsed, T_d)
    space = _spin_space(spin)
    ops = [Operator(space, math.sqrt(1.0 - p) * np.eye(SPIN_DIM))]
    if p > 0:
        for i in range(SPIN_DIM):
            for j in range(SPIN_DIM):
                m = np.zeros((SPIN_DIM, SPIN_DIM), dtype=complex)
                m[i, j] = math.sqrt(p / 3.0)
                ops.append(Operator(space, m))
    return KrausChannel(tuple(ops))
