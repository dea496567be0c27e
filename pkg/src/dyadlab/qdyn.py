"""Collapse dynamics of the quantum dyad.

Two complementary pictures of the same process:

* Ensemble picture.  The density matrix follows
  ``d(rho)/dt = -i[H, rho] - (lam/2) [A, [A, rho]]``
  for a diagonal collapse operator ``A`` with eigenvalues ``a_i``.  In the
  eigenbasis the double commutator acts entrywise,
  ``[A, [A, rho]]_ik = rho_ik (a_i - a_k)^2``, so with ``H = 0`` every
  off-diagonal element decays exponentially at rate
  ``(lam/2) (a_i - a_k)^2`` while populations stay put.  Integration is
  fixed-step classical Runge-Kutta (RK4).

* Trajectory picture.  A pure state follows the stochastic equation
  ``d(psi) = [-iH dt + sqrt(lam) (A - <A>) dW - (lam/2) (A - <A>)^2 dt] psi``
  with a standard Wiener increment ``dW ~ Normal(0, dt)``, integrated by
  Euler-Maruyama with renormalization after every step.  Averaging the
  projectors of many trajectories reproduces the ensemble picture.

Randomness is counter-based: a single master seed splits into independent
per-trajectory streams, so trajectory ``i`` is reproducible regardless of
how many trajectories are run or how they are batched.  Trajectories are
independent given distinct seeds and may run concurrently; ensemble
averaging is an order-independent reduction over immutable records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, StepTooLarge
from .model import swap as _swap_rule
from .optimizer import EigenAssignment

DIM = 4
COHERENCE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

_GUARD_ATOL = 1e-6


def validate_pure_state(psi, atol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (DIM,):
        raise ValueError(f"pure state must have {DIM} amplitudes, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"pure state norm is {norm!r}, not 1")
    return psi


def validate_density_matrix(
    rho,
    herm_atol: float = 1e-10,
    trace_atol: float = 1e-10,
    psd_atol: float = 1e-8,
) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"density matrix must be {DIM}x{DIM}, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_atol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > trace_atol or abs(np.trace(rho).imag) > trace_atol:
        raise ValueError("density matrix trace is not 1 within tolerance")
    if np.min(np.linalg.eigvalsh(rho)) < -psd_atol:
        raise ValueError("density matrix has a negative eigenvalue beyond tolerance")
    return rho


def build_collapse_operator(assignment) -> np.ndarray:
    """Diagonal of the collapse operator, in canonical state order."""
    if isinstance(assignment, EigenAssignment):
        values = assignment.as_array()
    else:
        values = np.asarray(assignment, dtype=float)
    if values.shape != (DIM,):
        raise ValueError("a collapse operator needs exactly 4 eigenvalues")
    if not np.all(np.isfinite(values)):
        raise ValueError("eigenvalues must be finite")
    if np.any(values < 0):
        raise ValueError("eigenvalues must be non-negative")
    return values.astype(float)


def coherence_decay_rate(a, lam: float, i: int, k: int) -> float:
    """Analytic damping exponent of rho_ik with H = 0: (lam/2)(a_i - a_k)^2."""
    a = np.asarray(a, dtype=float)
    if i == k:
        raise ValueError("decay rate is defined for distinct indices only")
    return 0.5 * lam * float(a[i] - a[k]) ** 2


def prepare_dyad_superposition() -> np.ndarray:
    """(|00> + |10>)/sqrt(2): channel A in the balanced state, B in 0."""
    return np.array([1.0, 0.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)


def basis_superposition(i: int, k: int) -> np.ndarray:
    """Equal-weight superposition of two computational basis states."""
    if i == k or not (0 <= i < DIM and 0 <= k < DIM):
        raise ValueError("need two distinct basis indices in 0..3")
    psi = np.zeros(DIM, dtype=complex)
    psi[i] = psi[k] = 1.0 / math.sqrt(2.0)
    return psi


def swap_hamiltonian() -> np.ndarray:
    """Hermitian generator whose unit-time evolution is exactly the swap gate."""
    perm = np.zeros((DIM, DIM))
    rule = _swap_rule()
    for idx in range(DIM):
        perm[rule.outputs[idx], idx] = 1.0
    return 0.5 * math.pi * (np.eye(DIM) - perm)


def state_populations(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return (psi.real**2 + psi.imag**2).astype(float)


def coherence_magnitudes(rho) -> dict:
    """|rho_ik| for the six upper-triangle index pairs, keyed 'ik'."""
    rho = np.asarray(rho, dtype=complex)
    return {f"{i}{k}": float(abs(rho[i, k])) for i, k in COHERENCE_PAIRS}


def trace_distance(rho, sigma) -> float:
    """Half the sum of singular values of rho - sigma."""
    delta = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(delta))))


def _commutator(x, y):
    return x @ y - y @ x


def _lindblad_rhs(rho, h, a_mat, lam):
    d = -0.5 * lam * _commutator(a_mat, _commutator(a_mat, rho))
    if h is not None:
        d = d - 1j * _commutator(h, rho)
    return d


def _check_guard(rho, where: str):
    trace_drift = abs(np.trace(rho).real - 1.0) + abs(np.trace(rho).imag)
    herm_drift = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if trace_drift > _GUARD_ATOL or herm_drift > _GUARD_ATOL or min_eig < -_GUARD_ATOL:
        raise StepTooLarge(
            f"state invariants drifted at {where} "
            f"(trace {trace_drift:.2e}, hermiticity {herm_drift:.2e}, "
            f"min eigenvalue {min_eig:.2e}); reduce dt"
        )


def _time_grid(t: float, dt: float, sample_times) -> tuple[int, list[int], np.ndarray]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t < 0:
        raise ValueError("duration must be non-negative")
    n_steps = int(round(t / dt))
    if sample_times is None:
        sample_times = [0.0, t] if n_steps > 0 else [0.0]
    steps = sorted({min(max(int(round(float(s) / dt)), 0), n_steps) for s in sample_times})
    times = np.array([s * dt for s in steps])
    return n_steps, steps, times


def lindblad_path(rho0, h, a, lam: float, dt: float, sample_times) -> tuple[np.ndarray, list]:
    """Integrate the master equation, returning states at the sample times.

    Sample times snap to the nearest step of the fixed grid.  Raises
    ``StepTooLarge`` when trace, Hermiticity, or positivity drift past 1e-6,
    which signals an unstable step size for the given eigenvalue gaps.
    """
    rho = validate_density_matrix(rho0).copy()
    a = build_collapse_operator(a)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    a_mat = np.diag(a).astype(complex)
    if h is not None:
        h = np.asarray(h, dtype=complex)
        if np.max(np.abs(h - h.conj().T)) > 1e-10:
            raise ValueError("Hamiltonian must be Hermitian")
    n_steps, steps, times = _time_grid(max(sample_times), dt, sample_times)
    out = []
    targets = set(steps)
    if 0 in targets:
        out.append(rho.copy())
    for step in range(n_steps):
        k1 = _lindblad_rhs(rho, h, a_mat, lam)
        k2 = _lindblad_rhs(rho + 0.5 * dt * k1, h, a_mat, lam)
        k3 = _lindblad_rhs(rho + 0.5 * dt * k2, h, a_mat, lam)
        k4 = _lindblad_rhs(rho + dt * k3, h, a_mat, lam)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step + 1 in targets:
            _check_guard(rho, where=f"t={(step + 1) * dt:g}")
            out.append(rho.copy())
    return times, out


def lindblad_evolve(rho0, h, a, lam: float, t: float, dt: float) -> np.ndarray:
    """State of the ensemble after time ``t``; see :func:`lindblad_path`."""
    times, states = lindblad_path(rho0, h, a, lam, dt, [t])
    return states[-1]


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """One stochastic trajectory: sampled states plus its collapse outcome.

    ``outcome`` is the basis-state index holding at least the threshold
    population at the end of the run, or None if no state dominates yet.
    """

    seed: int
    times: np.ndarray
    states: np.ndarray
    outcome: int | None
    eigenvalues: tuple
    lam: float
    dt: float
    hamiltonian: np.ndarray | None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def derive_trajectory_seed(master_seed: int, index: int) -> int:
    """Per-trajectory stream key for ensemble member ``index``.

    Feeding the returned integer to :func:`sde_trajectory` reproduces the
    member exactly, independent of batching or total trajectory count.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng_for_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _evolve_sde_batch(psi0, h, a, lam, dt, n_steps, noise, sample_steps):
    """Advance a batch of trajectories; returns (samples, final states).

    ``noise`` has shape (batch, n_steps); row order defines trajectory order.
    The arithmetic is identical for any batch size, so single runs and
    ensemble members agree bitwise.
    """
    batch = noise.shape[0]
    psi = np.tile(psi0, (batch, 1)).astype(complex)
    h_t = None if h is None else np.asarray(h, dtype=complex).T
    sqrt_dt = math.sqrt(dt)
    sqrt_lam = math.sqrt(lam)
    out = np.empty((batch, len(sample_steps), DIM), dtype=complex)
    pos = 0
    if sample_steps and sample_steps[0] == 0:
        out[:, 0, :] = psi
        pos = 1
    for step in range(n_steps):
        p = psi.real**2 + psi.imag**2
        centered = a[None, :] - (p @ a)[:, None]
        dw = noise[:, step] * sqrt_dt
        gain = sqrt_lam * centered * dw[:, None] - 0.5 * lam * dt * centered**2
        dpsi = gain * psi
        if h_t is not None:
            dpsi = dpsi + (-1j * dt) * (psi @ h_t)
        psi = psi + dpsi
        norm = np.sqrt((psi.real**2 + psi.imag**2).sum(axis=1))
        psi = psi / norm[:, None]
        if pos < len(sample_steps) and sample_steps[pos] == step + 1:
            out[:, pos, :] = psi
            pos += 1
    return out, psi


def _collapse_outcome(psi, threshold: float) -> int | None:
    pops = state_populations(psi)
    winner = int(np.argmax(pops))
    return winner if pops[winner] >= threshold else None


def sde_trajectory(
    psi0,
    h,
    a,
    lam: float,
    dt: float,
    t: float,
    seed: int,
    sample_times=None,
    collapse_threshold: float = 0.99,
) -> TrajectoryRecord:
    """Integrate one stochastic trajectory with its own noise stream.

    Deterministic given (seed, dt): rerunning with the same arguments
    reproduces every sampled state bitwise.
    """
    psi0 = validate_pure_state(psi0)
    a = build_collapse_operator(a)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    n_steps, steps, times = _time_grid(t, dt, sample_times)
    noise = _rng_for_seed(seed).standard_normal((1, n_steps))
    samples, final = _evolve_sde_batch(psi0, h, a, lam, dt, n_steps, noise, steps)
    return TrajectoryRecord(
        seed=seed,
        times=times,
        states=samples[0],
        outcome=_collapse_outcome(final[0], collapse_threshold),
        eigenvalues=tuple(a.tolist()),
        lam=float(lam),
        dt=float(dt),
        hamiltonian=None if h is None else np.asarray(h, dtype=complex),
    )


def simulate_ensemble(
    psi0,
    h,
    a,
    lam: float,
    dt: float,
    t: float,
    n_trajectories: int,
    seed: int = 0,
    sample_times=None,
    collapse_threshold: float = 0.99,
    batch_size: int = 1000,
) -> list:
    """Run many independent trajectories from one master seed.

    Trajectory ``i`` uses the stream ``derive_trajectory_seed(seed, i)``, so
    results are independent of ``batch_size`` and ``n_trajectories``.
    """
    psi0 = validate_pure_state(psi0)
    a = build_collapse_operator(a)
    if n_trajectories <= 0:
        raise ValueError("n_trajectories must be positive")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    n_steps, steps, times = _time_grid(t, dt, sample_times)
    h_arr = None if h is None else np.asarray(h, dtype=complex)
    records: list[TrajectoryRecord] = []
    for start in range(0, n_trajectories, batch_size):
        indices = range(start, min(start + batch_size, n_trajectories))
        seeds = [derive_trajectory_seed(seed, i) for i in indices]
        noise = np.empty((len(seeds), n_steps))
        for row, s in enumerate(seeds):
            noise[row] = _rng_for_seed(s).standard_normal(n_steps)
        samples, finals = _evolve_sde_batch(psi0, h_arr, a, lam, dt, n_steps, noise, steps)
        for row, s in enumerate(seeds):
            records.append(
                TrajectoryRecord(
                    seed=s,
                    times=times,
                    states=samples[row],
                    outcome=_collapse_outcome(finals[row], collapse_threshold),
                    eigenvalues=tuple(a.tolist()),
                    lam=float(lam),
                    dt=float(dt),
                    hamiltonian=h_arr,
                )
            )
    return records


def _same_grid(r1: TrajectoryRecord, r2: TrajectoryRecord) -> bool:
    if not np.array_equal(r1.times, r2.times):
        return False
    if r1.eigenvalues != r2.eigenvalues or r1.lam != r2.lam or r1.dt != r2.dt:
        return False
    if (r1.hamiltonian is None) != (r2.hamiltonian is None):
        return False
    if r1.hamiltonian is not None and not np.array_equal(r1.hamiltonian, r2.hamiltonian):
        return False
    return True


def ensemble_average(trajectories, at: float) -> np.ndarray:
    """Mean projector over the trajectories at sample time ``at``."""
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("need at least one trajectory")
    first = trajectories[0]
    for other in trajectories[1:]:
        if not _same_grid(first, other):
            raise GridMismatch("trajectories do not share grid and parameters")
    matches = np.nonzero(np.abs(first.times - at) <= 1e-9)[0]
    if len(matches) == 0:
        raise GridMismatch(f"time {at!r} is not on the shared sample grid")
    idx = int(matches[0])
    stacked = np.stack([r.states[idx] for r in trajectories])
    return np.einsum("ni,nj->ij", stacked, stacked.conj()) / len(trajectories)
