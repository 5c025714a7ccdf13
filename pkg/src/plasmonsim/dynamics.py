"""Steady-state response, time evolution and complex-eigenvalue analysis.

Steady state solves (Delta_p I - H) v = f for the mode amplitudes under a
weak drive of unit amplitude; all powers are quadratic in the drive and
therefore relative, so only ratios and enhancement factors are physical.
Time evolution applies the scaling-and-squaring matrix exponential of the
non-Hermitian Hamiltonian to a single-excitation amplitude vector.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from .errors import (
    ConditioningError,
    DomainError,
    TrackingAmbiguityError,
    UndefinedYieldError,
)
from .network import DriveSpec
from .quantities import from_fs, require_finite

#: reciprocal condition number below which a steady-state solve is rejected
RCOND_LIMIT = 1e-13


@dataclass(frozen=True, eq=False)
class SteadyState:
    """Mode amplitudes and per-channel output powers at one pump detuning."""

    detuning: float
    labels: tuple
    amplitudes: np.ndarray  # complex, per mode
    channels: tuple  # OutputChannel definitions used
    powers: dict  # channel id -> power (drive-normalized units)

    def amplitude(self, label):
        return self.amplitudes[self.labels.index(label)]

    @property
    def radiative_power(self):
        return sum(p for c, p in zip(self.channels, self.powers.values())
                   if c.kind == "radiative")

    @property
    def ohmic_power(self):
        return sum(p for c, p in zip(self.channels, self.powers.values())
                   if c.kind == "ohmic")


def _drive_vector(hamiltonian, drive):
    f = np.zeros(len(hamiltonian.modes), dtype=complex)
    f[hamiltonian.index(drive.mode)] = drive.amplitude
    return f


def _solve_amplitudes(hamiltonian, detunings, f):
    """Batched solve of (Delta_p I - H) v = f over a detuning array."""
    h = hamiltonian.matrix
    n = h.shape[0]
    d = np.atleast_1d(np.asarray(detunings, dtype=float))
    mats = d[:, None, None] * np.eye(n) - h[None, :, :]
    # guard the all-lossless edge case where the matrix can become singular
    rcond = np.abs(np.linalg.det(mats)) / np.maximum(
        np.linalg.norm(mats, axis=(1, 2)) ** n, np.finfo(float).tiny
    )
    if np.any(rcond < RCOND_LIMIT):
        raise ConditioningError(
            "steady-state matrix is singular or near-singular; "
            "every mode needs a positive width or a detuned pump"
        )
    rhs = np.broadcast_to(f[:, None], (len(d), n, 1))
    return np.linalg.solve(mats, rhs)[:, :, 0]


def channel_power(channel, labels, amplitudes):
    """Power in one output channel given the mode amplitudes.

    Coherent channels: |sum_k sqrt(gamma_k) v_k|^2.
    Incoherent channels: sum_k gamma_k |v_k|^2.
    """
    amps = np.asarray(amplitudes)
    if channel.combine == "coherent":
        total = 0.0 + 0.0j
        for label, rate in channel.terms:
            total += np.sqrt(rate) * amps[..., labels.index(label)]
        return np.abs(total) ** 2
    power = 0.0
    for label, rate in channel.terms:
        power = power + rate * np.abs(amps[..., labels.index(label)]) ** 2
    return power


def channel_cross_term(channel, labels, amplitudes):
    """Interference part of a coherent channel: coherent power minus the diagonal sum."""
    if channel.combine != "coherent":
        return np.zeros(np.asarray(amplitudes).shape[:-1])
    amps = np.asarray(amplitudes)
    diag = 0.0
    for label, rate in channel.terms:
        diag = diag + rate * np.abs(amps[..., labels.index(label)]) ** 2
    return channel_power(channel, labels, amplitudes) - diag


def steady_state(hamiltonian, drive, channels):
    """Steady-state amplitudes v = (Delta_p I - H)^-1 f and channel powers."""
    f = _drive_vector(hamiltonian, drive)
    v = _solve_amplitudes(hamiltonian, [drive.detuning], f)[0]
    labels = hamiltonian.labels
    powers = {c.id: float(channel_power(c, labels, v)) for c in channels}
    return SteadyState(drive.detuning, labels, v, tuple(channels), powers)


def steady_state_sweep(hamiltonian, detunings, drive_mode, channels, amplitude=1.0):
    """Vectorized steady state over a pump-detuning grid.

    Returns (amplitudes (n_points, n_modes), powers {channel id -> array}).
    """
    d = np.asarray(detunings, dtype=float)
    if d.size == 0:
        raise DomainError("empty detuning sweep")
    f = _drive_vector(hamiltonian, DriveSpec(drive_mode, 0.0, amplitude))
    v = _solve_amplitudes(hamiltonian, d, f)
    labels = hamiltonian.labels
    powers = {c.id: channel_power(c, labels, v) for c in channels}
    return v, powers


def mode_dissipation(hamiltonian, amplitudes):
    """Diagonal dissipation sum_i gamma_i |v_i|^2 (equals 2 Im(v^dag f) in steady state)."""
    widths = np.asarray(hamiltonian.total_widths)
    return np.sum(widths * np.abs(np.asarray(amplitudes)) ** 2, axis=-1)


def quantum_yield(state):
    """Radiated fraction of the total output power, in [0, 1]."""
    radiative = state.radiative_power
    total = radiative + state.ohmic_power
    if total <= 0.0:
        raise UndefinedYieldError("no output power in any channel; yield undefined")
    return radiative / total


def yield_from_powers(channels, powers):
    """Quantum yield from a channel-power mapping (arrays allowed)."""
    radiative = sum(np.asarray(powers[c.id]) for c in channels if c.kind == "radiative")
    ohmic = sum(np.asarray(powers[c.id]) for c in channels if c.kind == "ohmic")
    total = radiative + ohmic
    if np.any(total <= 0.0):
        raise UndefinedYieldError("no output power in any channel; yield undefined")
    return radiative / total


def fano_detuning(J, g1, G):
    """Pump-cavity detuning of maximal destructive interference, Delta_0 = -J g1 / G."""
    require_finite(J=J, g1=g1, G=G)
    if G == 0.0:
        raise DomainError("Fano detuning undefined for G = 0")
    return -J * g1 / G


@dataclass(frozen=True, eq=False)
class TimeTrace:
    """Mode populations |v_i(t)|^2 on a femtosecond time grid."""

    times_fs: np.ndarray
    labels: tuple
    populations: dict  # label -> np.ndarray

    def population(self, label):
        return self.populations[label]

    @property
    def total(self):
        return sum(self.populations.values())


def evolve(hamiltonian, initial, times_fs):
    """Propagate amplitudes v(t) = exp(-i H t) v(0) on an increasing time grid.

    times_fs starts at 0; each point is evaluated with its own
    scaling-and-squaring matrix exponential, so the grid need not be uniform.
    """
    t_fs = np.asarray(times_fs, dtype=float)
    if t_fs.size == 0 or t_fs[0] != 0.0 or np.any(np.diff(t_fs) <= 0):
        raise DomainError("time grid must increase from 0")
    v0 = np.asarray(initial, dtype=complex)
    if v0.shape != (len(hamiltonian.modes),):
        raise DomainError(f"initial amplitudes must have shape ({len(hamiltonian.modes)},)")
    h = hamiltonian.matrix
    t_nat = from_fs(t_fs)
    amps = np.empty((t_fs.size, v0.size), dtype=complex)
    for k, t in enumerate(t_nat):
        amps[k] = expm(-1j * h * t) @ v0 if t != 0.0 else v0
    populations = {
        label: np.abs(amps[:, i]) ** 2 for i, label in enumerate(hamiltonian.labels)
    }
    return TimeTrace(times_fs=t_fs, labels=hamiltonian.labels, populations=populations)


def default_time_grid(hamiltonian, points=4096, lifetimes=10.0):
    """Femtosecond grid of `points` samples spanning `lifetimes` of the slowest branch."""
    widths = [-2.0 * lam.imag for lam in np.linalg.eigvals(hamiltonian.matrix)]
    positive = [w for w in widths if w > 0]
    if not positive:
        raise DomainError("no decaying branch; cannot size a default time grid")
    from .quantities import to_fs

    return np.linspace(0.0, float(to_fs(lifetimes / min(positive))), points)


def count_oscillation_maxima(times_fs, population, threshold=1e-3, settle_fs=0.0):
    """Number of strict local maxima above threshold, after an initial settling window.

    The settling window excludes the fast virtual-excursion transient of
    strongly damped far-detuned modes, which would otherwise register as
    sub-resolution maxima; pass settle_fs = 10 / gamma_fastest (converted
    to fs) for that purpose.
    """
    t = np.asarray(times_fs)
    p = np.asarray(population)
    interior = (p[1:-1] > p[:-2]) & (p[1:-1] > p[2:])
    eligible = (p[1:-1] > threshold) & (t[1:-1] >= settle_fs)
    return int(np.sum(interior & eligible))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Per-detuning channel powers from a steady-state sweep."""

    detunings: np.ndarray
    channels: tuple
    powers: dict  # channel id -> array

    @property
    def radiative_total(self):
        return sum(self.powers[c.id] for c in self.channels if c.kind == "radiative")

    @property
    def ohmic_total(self):
        return sum(self.powers[c.id] for c in self.channels if c.kind == "ohmic")

    @property
    def quantum_yield(self):
        return yield_from_powers(self.channels, self.powers)


def emission_spectrum(hamiltonian, detunings, channels, drive_mode="emitter"):
    """Radiated power vs pump detuning for a weak drive on one mode."""
    _, powers = steady_state_sweep(hamiltonian, detunings, drive_mode, channels)
    return SpectrumResult(np.asarray(detunings, dtype=float), tuple(channels), powers)


@dataclass(frozen=True, eq=False)
class EigenBranchSet:
    """Continuity-tracked complex eigenvalue branches over a parameter sweep."""

    sweep_values: np.ndarray
    eigenvalues: np.ndarray  # complex (n_sweep, n_modes)
    eigenvectors: np.ndarray  # complex (n_sweep, n_modes, n_modes); [:, :, b] is branch b

    @property
    def detunings(self):
        return self.eigenvalues.real

    @property
    def linewidths(self):
        return -2.0 * self.eigenvalues.imag

    @property
    def n_branches(self):
        return self.eigenvalues.shape[1]


def _match_branches(prev_vecs, prev_vals, vecs, vals):
    """Order eigenpairs to maximize eigenvector overlap with the previous point."""
    overlap = np.abs(prev_vecs.conj().T @ vecs)
    scale = max(np.max(np.abs(vals - vals.mean())), np.finfo(float).tiny)
    proximity = 1.0 / (1.0 + np.abs(prev_vals[:, None] - vals[None, :]) / scale)
    for i in range(overlap.shape[0]):
        order = np.argsort(-overlap[i])
        if len(order) > 1 and abs(overlap[i, order[0]] - overlap[i, order[1]]) < 1e-12:
            a, b = order[0], order[1]
            if abs(proximity[i, a] - proximity[i, b]) < 1e-12:
                raise TrackingAmbiguityError(
                    f"branch {i}: eigenvector overlaps and eigenvalue distances both tie"
                )
    # eigenvalue proximity only breaks exact overlap ties
    _, cols = linear_sum_assignment(-(overlap + 1e-9 * proximity))
    return cols


def eigen_branches(matrices, sweep_values):
    """Track eigenvalue branches of a Hamiltonian family across a sweep.

    matrices: sequence of (n, n) complex arrays, one per sweep value.  The
    first point orders branches by ascending real part; subsequent points
    are matched by maximal eigenvector overlap, with eigenvalue proximity
    as tie-break.
    """
    sweep = np.asarray(sweep_values, dtype=float)
    if sweep.size == 0:
        raise DomainError("empty sweep")
    if len(matrices) != sweep.size:
        raise DomainError("one matrix per sweep value required")

    vals0, vecs0 = np.linalg.eig(np.asarray(matrices[0]))
    order = np.argsort(vals0.real, kind="stable")
    vals0, vecs0 = vals0[order], vecs0[:, order]
    vecs0 /= np.linalg.norm(vecs0, axis=0)

    n = vals0.size
    all_vals = np.empty((sweep.size, n), dtype=complex)
    all_vecs = np.empty((sweep.size, n, n), dtype=complex)
    all_vals[0], all_vecs[0] = vals0, vecs0
    for k in range(1, sweep.size):
        vals, vecs = np.linalg.eig(np.asarray(matrices[k]))
        vecs /= np.linalg.norm(vecs, axis=0)
        cols = _match_branches(all_vecs[k - 1], all_vals[k - 1], vecs, vals)
        all_vals[k] = vals[cols]
        all_vecs[k] = vecs[:, cols]
    return EigenBranchSet(sweep, all_vals, all_vecs)


@dataclass(frozen=True)
class AntiCrossingMetrics:
    """Splitting and linewidths of the two coupled branches of an anti-crossing."""

    two_g_eff: float  # minimum real-part separation over the sweep (eV)
    kappa_1: float  # larger linewidth at the center (eV)
    kappa_2: float  # smaller linewidth at the center (eV)
    cooperativity: float  # 4 g_eff^2 / (kappa_1 kappa_2)
    pair: tuple  # branch indices analyzed
    min_re_separation: float
    min_im_separation: float


def coupled_pair(branchset, center_value=0.0):
    """Indices of the two branches closest to zero real part at the sweep center."""
    idx = int(np.argmin(np.abs(branchset.sweep_values - center_value)))
    order = np.argsort(np.abs(branchset.eigenvalues[idx].real), kind="stable")
    pair = tuple(sorted(int(b) for b in order[:2]))
    return pair, idx


def anticrossing_metrics(branchset, pair=None, center_value=0.0):
    """Anti-crossing metrics for the coupled pair of an EigenBranchSet.

    two_g_eff is the minimum real-part separation over the sweep; the
    linewidths and cooperativity are evaluated at the sweep point closest
    to center_value.
    """
    auto_pair, center = coupled_pair(branchset, center_value)
    if pair is None:
        pair = auto_pair
    else:
        center = int(np.argmin(np.abs(branchset.sweep_values - center_value)))
    a, b = pair
    lam_a, lam_b = branchset.eigenvalues[:, a], branchset.eigenvalues[:, b]
    re_sep = np.abs(lam_a.real - lam_b.real)
    im_sep = np.abs(lam_a.imag - lam_b.imag)
    widths = sorted((-2.0 * lam_a[center].imag, -2.0 * lam_b[center].imag), reverse=True)
    two_g = float(np.min(re_sep))
    kappa_1, kappa_2 = float(widths[0]), float(widths[1])
    coop = two_g**2 / (kappa_1 * kappa_2) if kappa_1 * kappa_2 > 0 else float("inf")
    return AntiCrossingMetrics(
        two_g_eff=two_g,
        kappa_1=kappa_1,
        kappa_2=kappa_2,
        cooperativity=coop,
        pair=tuple(pair),
        min_re_separation=float(np.min(re_sep)),
        min_im_separation=float(np.min(im_sep)),
    )
