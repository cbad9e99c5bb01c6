"""Long-range Rydberg CZ gate simulation for a two-atom ground/Rydberg system.

The drive is a constant-amplitude Rabi pulse with logistic turn-on/off and a
phase profile

    phi(t) = 2*pi*Delta0*t + a*sin(2*pi*f*(t - t0)) * exp(-((t - t0)/tau)^4)

anti-symmetric about the pulse midpoint t0.  Single-atom dynamics run on
{|1>, |r>}, pair dynamics on the symmetric basis {|11>, |W>, |rr>} with the
blockade shift V on |rr>.  All frequencies are stored as cycles (MHz, the
X/2pi convention) and multiplied by 2*pi inside the Hamiltonian; times are
nanoseconds at the API surface and microseconds internally.

Rydberg decay enters perturbatively through the time-integrated Rydberg
population T_R: the reported fidelity is F = F_ave - T_R/tau_R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize

from .constants import TAU_E_NS

__all__ = [
    "PulseParams",
    "GateContext",
    "SimResult",
    "SingleAtomTrace",
    "PairTrace",
    "rabi_envelope",
    "phase_profile",
    "simulate_single",
    "simulate_pair",
    "gate_phase",
    "bell_fidelity_phase_gate",
    "bell_state_fidelity",
    "average_fidelity",
    "integrated_rydberg_time",
    "decay_corrected_fidelity",
    "fidelity_floor",
    "simulate_gate",
    "optimize_pulse",
    "GATE_TABLE",
    "GatePreset",
]


@dataclass(frozen=True)
class PulseParams:
    """Analytic pulse family: amplitude, detuning, and phase modulation.

    omega0_mhz and delta0_mhz are quoted as Omega/2pi and Delta0/2pi; the
    modulation amplitude is in radians, tau_ns is the super-Gaussian
    envelope width of the modulation, t_gate_ns the nominal duration.
    """

    omega0_mhz: float
    delta0_mhz: float
    mod_amp: float
    mod_freq_mhz: float
    tau_ns: float
    t_gate_ns: float
    tau_e_ns: float = TAU_E_NS

    def __post_init__(self) -> None:
        if min(self.omega0_mhz, self.mod_freq_mhz, self.tau_ns, self.t_gate_ns) <= 0:
            raise ValueError("omega0, f, tau and t_gate must be positive")
        if self.t_gate_ns <= 40 * self.tau_e_ns:
            raise ValueError("t_gate too short for the envelope to open and close")


@dataclass(frozen=True)
class GateContext:
    """Two-atom interaction strength and Rydberg lifetime for one gate."""

    interaction_mhz: float
    lifetime_us: float
    level_label: str = ""
    separation_um: float | None = None

    def __post_init__(self) -> None:
        if self.interaction_mhz <= 0 or self.lifetime_us <= 0:
            raise ValueError("interaction strength and lifetime must be positive")


@dataclass(frozen=True)
class SingleAtomTrace:
    """|1> atom driven to |r> and back: final amplitude and populations."""

    times_ns: np.ndarray
    ground_pop: np.ndarray
    rydberg_pop: np.ndarray
    a01: float
    phi01: float
    norm_drift: float


@dataclass(frozen=True)
class PairTrace:
    """|11> pair on the symmetric basis: final amplitude and populations."""

    times_ns: np.ndarray
    gg_pop: np.ndarray
    single_pop: np.ndarray
    double_pop: np.ndarray
    a11: float
    phi11: float
    norm_drift: float


@dataclass(frozen=True)
class SimResult:
    """Extracted gate data: diagonal-gate amplitudes, phases, fidelities."""

    a01: float
    a11: float
    phi01: float
    phi11: float
    gate_phase: float
    t_rydberg_ns: float
    f_average: float
    fidelity: float
    epsilon_r: float
    norm_drift: float

    @property
    def epsilon(self) -> float:
        return 1.0 - self.fidelity


def rabi_envelope(t_ns: float | np.ndarray, params: PulseParams) -> float | np.ndarray:
    """Rabi amplitude Omega(t)/2pi in MHz, clamped at zero."""
    te = params.tau_e_ns
    t = np.asarray(t_ns, dtype=float)
    up = 1.0 / (1.0 + np.exp(-(t - 20.0 * te) / te))
    down = 1.0 / (1.0 + np.exp(-(params.t_gate_ns - 20.0 * te - t) / te))
    value = params.omega0_mhz * np.maximum(up + down - 1.0, 0.0)
    return float(value) if np.isscalar(t_ns) else value


def phase_profile(t_ns: float | np.ndarray, params: PulseParams) -> float | np.ndarray:
    """Drive phase phi(t) in radians; Delta0 enters as 2*pi*Delta0*t."""
    t = np.asarray(t_ns, dtype=float) * 1e-3  # us
    t0 = params.t_gate_ns * 1e-3 / 2.0
    tau = params.tau_ns * 1e-3
    mod = params.mod_amp * np.sin(2.0 * np.pi * params.mod_freq_mhz * (t - t0))
    mod = mod * np.exp(-(((t - t0) / tau) ** 4))
    value = 2.0 * np.pi * params.delta0_mhz * t + mod
    return float(value) if np.isscalar(t_ns) else value


def _integrate(params: PulseParams, dim: int, v_mhz: float, rtol: float,
               max_step_ns: float, grid_ns: float):
    """Propagate i dc/dt = H(t) c from the all-ground state on a uniform grid."""
    t_gate_us = params.t_gate_ns * 1e-3
    te_us = params.tau_e_ns * 1e-3
    t0_us = t_gate_us / 2.0
    tau_us = params.tau_ns * 1e-3
    om0 = params.omega0_mhz
    d0 = params.delta0_mhz
    a_mod = params.mod_amp
    f_mod = params.mod_freq_mhz
    v_ang = 2.0 * np.pi * v_mhz
    root2 = math.sqrt(2.0)

    def rhs(t, y):
        up = 1.0 / (1.0 + math.exp(-(t - 20.0 * te_us) / te_us))
        down = 1.0 / (1.0 + math.exp(-(t_gate_us - 20.0 * te_us - t) / te_us))
        om = 2.0 * np.pi * om0 * max(up + down - 1.0, 0.0)
        dt0 = t - t0_us
        ph = 2.0 * np.pi * d0 * t + a_mod * math.sin(2.0 * np.pi * f_mod * dt0) * math.exp(-((dt0 / tau_us) ** 4))
        g = 0.5 * om * complex(math.cos(ph), -math.sin(ph))
        if dim == 2:
            c0 = complex(y[0], y[2])
            c1 = complex(y[1], y[3])
            d_0 = -1j * (g * c1)
            d_1 = -1j * (g.conjugate() * c0)
            return [d_0.real, d_1.real, d_0.imag, d_1.imag]
        c0 = complex(y[0], y[3])
        c1 = complex(y[1], y[4])
        c2 = complex(y[2], y[5])
        gg = root2 * g
        d_0 = -1j * (gg * c1)
        d_1 = -1j * (gg.conjugate() * c0 + gg * c2)
        d_2 = -1j * (gg.conjugate() * c1 + v_ang * c2)
        return [d_0.real, d_1.real, d_2.real, d_0.imag, d_1.imag, d_2.imag]

    y0 = np.zeros(2 * dim)
    y0[0] = 1.0
    times_us = np.arange(0.0, t_gate_us + 0.5e-3 * grid_ns, grid_ns * 1e-3)
    times_us[-1] = t_gate_us
    sol = solve_ivp(
        rhs,
        (0.0, t_gate_us),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-2,
        max_step=max_step_ns * 1e-3,
        t_eval=times_us,
    )
    if not sol.success:
        raise RuntimeError(f"integrator failed: {sol.message}")
    amps = sol.y[:dim] + 1j * sol.y[dim:]
    norms = (np.abs(amps) ** 2).sum(axis=0)
    drift = float(np.max(np.abs(norms - 1.0)))
    return times_us * 1e3, amps, drift


def simulate_single(
    params: PulseParams,
    *,
    rtol: float = 1e-10,
    max_step_ns: float = 0.1,
    grid_ns: float = 0.1,
) -> SingleAtomTrace:
    """Drive one atom |1> <-> |r|; returns a01 = |<1|c>|, phi01 and populations."""
    times, amps, drift = _integrate(params, 2, 0.0, rtol, max_step_ns, grid_ns)
    final = amps[0, -1]
    return SingleAtomTrace(
        times_ns=times,
        ground_pop=np.abs(amps[0]) ** 2,
        rydberg_pop=np.abs(amps[1]) ** 2,
        a01=float(abs(final)),
        phi01=float(np.angle(final)),
        norm_drift=drift,
    )


def simulate_pair(
    params: PulseParams,
    context: GateContext,
    *,
    rtol: float = 1e-10,
    max_step_ns: float = 0.1,
    grid_ns: float = 0.1,
) -> PairTrace:
    """Drive the |11> pair on {|11>, |W>, |rr>} with blockade shift V on |rr>."""
    times, amps, drift = _integrate(
        params, 3, context.interaction_mhz, rtol, max_step_ns, grid_ns
    )
    final = amps[0, -1]
    return PairTrace(
        times_ns=times,
        gg_pop=np.abs(amps[0]) ** 2,
        single_pop=np.abs(amps[1]) ** 2,
        double_pop=np.abs(amps[2]) ** 2,
        a11=float(abs(final)),
        phi11=float(np.angle(final)),
        norm_drift=drift,
    )


def wrap_angle(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    out = math.fmod(phi + math.pi, 2.0 * math.pi)
    if out <= 0.0:
        out += 2.0 * math.pi
    return out - math.pi


def gate_phase(phi01: float, phi11: float) -> float:
    """CZ gate phase phi = phi11 - 2*phi01 (symmetric gate), wrapped to (-pi, pi]."""
    return wrap_angle(phi11 - 2.0 * phi01)


def bell_fidelity_phase_gate(phi00: float, phi: float) -> float:
    """Bell fidelity of a pure phase gate (all amplitudes equal to 1)."""
    return (3.0 + 2.0 * math.cos(phi00) - math.cos(phi - phi00) - 2.0 * math.cos(phi)) / 8.0


def bell_state_fidelity(a01: float, a11: float, phi: float) -> float:
    """Bell-preparation fidelity of a symmetric diagonal gate with phi00 = 0."""
    return (
        1.0 + 4.0 * a01**2 + 4.0 * a01 + a11**2 - 2.0 * (1.0 + 2.0 * a01) * a11 * math.cos(phi)
    ) / 16.0


def average_fidelity(a01: float, a11: float, phi: float) -> float:
    """Fidelity averaged over two-qubit input states, phi00 = 0 convention."""
    return (
        5.0 + 4.0 * a01**2 + 4.0 * a01 + a11**2 - 2.0 * (1.0 + 2.0 * a01) * a11 * math.cos(phi)
    ) / 20.0


def integrated_rydberg_time(single: SingleAtomTrace, pair: PairTrace) -> float:
    """T_R in ns: (1/2) integral of (P_R + P_singly-excited + P_RR) dt."""
    if len(single.times_ns) != len(pair.times_ns) or not np.allclose(
        single.times_ns, pair.times_ns
    ):
        raise ValueError("single and pair traces must share one time grid")
    total = single.rydberg_pop + pair.single_pop + pair.double_pop
    return float(0.5 * np.trapezoid(total, single.times_ns))


def decay_corrected_fidelity(f_average: float, t_rydberg_ns: float, lifetime_us: float) -> float:
    """F = F_ave - T_R/tau_R with the ns/us conversion handled here."""
    return f_average - (t_rydberg_ns * 1e-3) / lifetime_us


def fidelity_floor(context: GateContext, epsilon: float | None = None) -> tuple[float, float | None]:
    """Minimum gate error 2/(V*tau_R) for angular V; optionally a ratio eps/eps_min."""
    eps_min = 2.0 / (2.0 * math.pi * context.interaction_mhz * context.lifetime_us)
    ratio = None if epsilon is None else epsilon / eps_min
    return eps_min, ratio


def simulate_gate(
    params: PulseParams,
    context: GateContext,
    *,
    rtol: float = 1e-10,
    max_step_ns: float = 0.1,
    grid_ns: float = 0.1,
) -> SimResult:
    """Full pipeline: both simulations, gate phase, F_ave and decay-corrected F."""
    single = simulate_single(params, rtol=rtol, max_step_ns=max_step_ns, grid_ns=grid_ns)
    pair = simulate_pair(params, context, rtol=rtol, max_step_ns=max_step_ns, grid_ns=grid_ns)
    phi = gate_phase(single.phi01, pair.phi11)
    f_ave = average_fidelity(single.a01, pair.a11, phi)
    t_r = integrated_rydberg_time(single, pair)
    fid = decay_corrected_fidelity(f_ave, t_r, context.lifetime_us)
    return SimResult(
        a01=single.a01,
        a11=pair.a11,
        phi01=single.phi01,
        phi11=pair.phi11,
        gate_phase=phi,
        t_rydberg_ns=t_r,
        f_average=f_ave,
        fidelity=fid,
        epsilon_r=(t_r * 1e-3) / context.lifetime_us,
        norm_drift=max(single.norm_drift, pair.norm_drift),
    )


# Parameter bounds for the pulse search; they bracket every preset below.
_BOUNDS = {
    "omega0_mhz": (0.05, 30.0),
    "delta0_mhz": (-5.0, 5.0),
    "mod_amp": (0.0, 2.0 * math.pi),
    "mod_freq_mhz": (0.05, 30.0),
    "tau_ns": (10.0, 2000.0),
}


@dataclass(frozen=True)
class OptimizeOutcome:
    params: PulseParams
    result: SimResult
    evaluations: int
    budget_exhausted: bool


def optimize_pulse(
    context: GateContext,
    init: PulseParams,
    *,
    budget: int = 400,
    restarts: int = 8,
    seed: int = 0,
    search_rtol: float = 1e-8,
    search_max_step_ns: float = 1.0,
) -> OptimizeOutcome:
    """Derivative-free search over (Omega0, Delta0, a, f, tau) at fixed t_gate.

    Nelder-Mead with deterministic random restarts around the best point;
    never returns anything worse than the initial parameters.  The search
    runs at a relaxed integrator setting; the returned SimResult is
    re-evaluated at full precision.
    """
    rng = np.random.default_rng(seed)
    names = list(_BOUNDS)
    lo = np.array([_BOUNDS[k][0] for k in names])
    hi = np.array([_BOUNDS[k][1] for k in names])

    def to_params(x: np.ndarray) -> PulseParams:
        vals = dict(zip(names, np.clip(x, lo, hi)))
        return replace(init, **vals)

    evals = 0

    def objective(x: np.ndarray) -> float:
        nonlocal evals
        if evals >= budget:
            return 1.0  # budget spent; pessimal value stops progress
        evals += 1
        if np.any(x < lo) or np.any(x > hi):
            return 1.0
        try:
            res = simulate_gate(
                to_params(x), context, rtol=search_rtol, max_step_ns=search_max_step_ns
            )
        except (RuntimeError, ValueError):
            return 1.0
        return 1.0 - res.fidelity

    x_init = np.array([getattr(init, k) for k in names])
    best_x = x_init
    best_val = objective(x_init)
    starts = [x_init]
    for _ in range(max(0, restarts - 1)):
        jitter = rng.normal(scale=0.05, size=len(names)) * (hi - lo)
        starts.append(np.clip(best_x + jitter, lo, hi))
    for x0 in starts:
        if evals >= budget:
            break
        out = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": max(1, budget - evals), "xatol": 1e-4, "fatol": 1e-9},
        )
        if out.fun < best_val:
            best_val = out.fun
            best_x = np.clip(out.x, lo, hi)

    final_params = to_params(best_x)
    final = simulate_gate(final_params, context)
    init_final = simulate_gate(init, context)
    if init_final.fidelity > final.fidelity:
        final_params, final = init, init_final
    return OptimizeOutcome(
        params=final_params,
        result=final,
        evaluations=evals,
        budget_exhausted=evals >= budget,
    )


@dataclass(frozen=True)
class GatePreset:
    """One published gate design: distance class, context, pulse, fidelity."""

    row: int
    distance: float
    separation_um: float
    level_label: str
    context: GateContext
    params: PulseParams
    fidelity: float
    error_ratio: float


def _preset(row, d, r_um, level, v, fid, t_gate, a, f, omega, delta0, tau, ratio) -> GatePreset:
    return GatePreset(
        row=row,
        distance=d,
        separation_um=r_um,
        level_label=level,
        context=GateContext(
            interaction_mhz=v,
            lifetime_us={"50s1/2": 60.4, "83s1/2": 209.0, "90s1/2": 252.0}[level],
            level_label=level,
            separation_um=r_um,
        ),
        params=PulseParams(
            omega0_mhz=omega,
            delta0_mhz=delta0,
            mod_amp=a,
            mod_freq_mhz=f,
            tau_ns=tau,
            t_gate_ns=t_gate,
        ),
        fidelity=fid,
        error_ratio=ratio,
    )


GATE_TABLE: tuple[GatePreset, ...] = (
    _preset(1, 1.0, 1.7, "50s1/2", 415.0, 0.9996, 130, 0.774, 20.0, 21.5, -1.59, 1907, 31.0),
    _preset(2, 1.41, 2.40, "50s1/2", 58.5, 0.9993, 180, 0.749, 10.6, 11.3, -1.59, 374, 7.8),
    _preset(3, 2.0, 3.4, "83s1/2", 1160.0, 0.9999, 150, 1.44, 9.96, 15.9, -0.818, 20.3, 76.0),
    _preset(4, 2.24, 3.81, "83s1/2", 780.0, 0.9999, 150, 1.45, 9.91, 15.9, -0.856, 20.2, 51.0),
    _preset(5, 3.16, 5.37, "83s1/2", 170.0, 0.9998, 180, 0.707, 11.5, 11.4, -0.451, 744, 22.0),
    _preset(6, 3.61, 6.14, "83s1/2", 85.0, 0.9998, 180, 0.594, 13.3, 11.2, 0.152, 922, 11.0),
    _preset(7, 4.12, 7.00, "83s1/2", 40.0, 0.9998, 180, 0.569, 14.1, 11.1, -0.505, 81, 5.3),
    _preset(8, 4.47, 7.60, "83s1/2", 25.0, 0.9998, 200, 0.622, 14.4, 9.54, -0.897, 452, 3.3),
    _preset(9, 5.0, 8.65, "83s1/2", 13.0, 0.9996, 270, 0.439, 14.46, 11.2, 0.395, 97.3, 3.4),
    _preset(10, 5.10, 8.67, "83s1/2", 11.5, 0.9996, 270, 0.502, 14.63, 11.545, 0.34, 94.2, 3.0),
    _preset(11, 5.83, 9.91, "83s1/2", 5.2, 0.9995, 270, 2.0, 12.9, 6.72, -0.976, 34.5, 1.7),
    _preset(12, 6.0, 10.2, "90s1/2", 11.2, 0.9996, 350, 0.578, 6.42, 4.32, -0.383, 1756, 3.5),
    _preset(13, 6.08, 10.3, "90s1/2", 10.1, 0.9995, 400, 0.725, 5.89, 3.85, -0.469, 821, 4.0),
    _preset(14, 6.40, 10.9, "90s1/2", 7.7, 0.9994, 450, 0.496, 8.01, 5.88, 0.422, 197, 3.7),
    _preset(15, 6.71, 11.4, "90s1/2", 5.8, 0.9994, 460, 0.556, 7.54, 5.98, 0.338, 171, 2.8),
    _preset(16, 7.07, 12.0, "90s1/2", 4.3, 0.9993, 465, 1.16, 5.05, 6.36, 0.794, 367, 2.4),
    _preset(17, 7.21, 12.3, "90s1/2", 3.8, 0.9993, 480, 1.46, 7.06, 7.26, 0.074, 103, 2.1),
)


def gate_preset(row: int) -> GatePreset:
    if not 1 <= row <= len(GATE_TABLE):
        raise ValueError(f"gate row must be 1..{len(GATE_TABLE)}, got {row}")
    return GATE_TABLE[row - 1]
