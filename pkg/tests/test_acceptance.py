"""End-to-end acceptance checks, one test per criterion.

Each test stores a one-line summary with ``record_property("detail", ...)``
before asserting, and the conftest hook prints a PASS/FAIL line for every
criterion at the end of the session.  Map series built along the way are
fed to a shared CPTP recorder that the last test inspects.
"""

import math

import numpy as np
import pytest

from polariton_ttm.disorder import (DisorderSpec, average_density_trajectories, average_dynamical_maps,
                                    disorder_rate_sweep, run_ensemble, sample_realizations)
from polariton_ttm.kinetics import (analytic_damped_cosine_tau, kappa_sweep, learning_plan, moments,
                                    relaxation_matrix, resonance_scan, steady_state)
from polariton_ttm.maps import check_cptp, dynamical_maps, markovian_maps, observable_trajectory, propagate_exact
from polariton_ttm.models import (ModelSpec, damped_cosine_generator, initial_state,
                                  single_mode_decay_generator, tls_observable, tls_state)
from polariton_ttm.ttm import transfer_tensors, ttm_propagate

KAPPAS = np.logspace(-2, 3, 12)
SCAN = np.linspace(0.005, 2, 400)
SPACING = SCAN[1] - SCAN[0]

# frozen from a sparse expm_multiply propagation of the full system to kappa t = 200
STEADY_SINGLY_N2 = [-0.25, -0.25]
STEADY_TRIPLY_N4 = [-0.4375, -0.4375, -0.4375, 0.0625]
# frozen from the first full run of the sweep (M = 50, seed 1, dt 0.02, window 10)
DISORDER_RATIO_25 = 2.215042263638948


class CPTPRecorder:
    def __init__(self):
        self.count = 0
        self.trace = self.herm = 0.0
        self.choi = math.inf

    def __call__(self, series):
        d = check_cptp(series)
        self.count += 1
        self.trace = max(self.trace, d["trace_err"])
        self.herm = max(self.herm, d["hermiticity_err"])
        self.choi = min(self.choi, d["min_choi_eig"])


CPTP = CPTPRecorder()


def checked_maps(spec, dt, K):
    series = dynamical_maps(spec, dt, K)
    CPTP(series)
    return series


def expectation(op, rho):
    return float(np.trace(op @ rho).real)


def interior_maxima(y):
    y = np.asarray(y)
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] > y[i + 1]]


def near(peaks, target):
    return any(abs(p - target) <= SPACING * (1 + 1e-9) for p in peaks)


def test_c01_extrapolation_fidelity(record_property):
    spec = ModelSpec.create("TC", 4, n_cavity=5, g=5.0)
    sz = tls_observable("sz:1", 4)
    r0 = tls_state("fully_excited", 4).matrix
    exact = observable_trajectory(
        propagate_exact(spec, initial_state("fully_excited", spec), 0.01, 2000, reduced=True), None, sz)
    maps = checked_maps(spec, 0.01, 350)
    err = {}
    for window in (3.5, 1.5):
        T = transfer_tensors(maps.truncate(int(round(window / 0.01))))
        traj = ttm_propagate(T, r0, 2000, max_drift=math.inf)
        err[window] = float(np.max(np.abs(observable_trajectory(traj, None, sz) - exact)))
    record_property("detail", f"max error window 3.5 = {err[3.5]:.3g} (need <= 1e-3), "
                              f"window 1.5 = {err[1.5]:.3g} (ratio {err[1.5] / err[3.5]:.1f}, need >= 10)")
    assert err[1.5] >= 10 * err[3.5]
    assert err[3.5] <= 1e-3


def _steady_sz(n, pattern, window, n_cavity=None):
    spec = ModelSpec.create("TC", n, g=10.0, **({"n_cavity": n_cavity} if n_cavity else {}))
    T = transfer_tensors(checked_maps(spec, 0.01, int(round(window / 0.01))))
    rs = steady_state(T, tls_state(pattern, n).matrix, method="auto").matrix
    return np.array([expectation(tls_observable(f"sz:{j}", n), rs) for j in range(1, n + 1)])


def test_c02_steady_states(record_property):
    full2 = _steady_sz(2, "fully_excited", 6)
    full4 = _steady_sz(4, "fully_excited", 4, 5)
    single2 = _steady_sz(2, "singly_excited:1", 6)
    triple4 = _steady_sz(4, "k_excited:3", 4, 5)
    worst_full = max(np.max(np.abs(full2 + 0.5)), np.max(np.abs(full4 + 0.5)))
    worst_trap = max(np.max(np.abs(single2 - STEADY_SINGLY_N2)), np.max(np.abs(triple4 - STEADY_TRIPLY_N4)))
    lift = min(np.min(np.abs(single2 + 0.5)), np.max(np.abs(triple4 + 0.5)))
    record_property("detail", f"fully excited |sz + 0.5| <= {worst_full:.2g}; trapped vs oracle {worst_trap:.2g}; "
                              f"trapped lift {lift:.3g}")
    assert worst_full <= 1e-6
    assert worst_trap <= 1e-4
    assert np.all(np.abs(single2 + 0.5) >= 0.01) and np.max(np.abs(triple4 + 0.5)) >= 0.01


def _survival_rates(n, kappas):
    rows = kappa_sweep(ModelSpec.create("TC", n), kappas, tls_state("fully_excited", n).matrix,
                       tls_observable("survival", n), check=CPTP)
    return np.array([r["rate"] for r in rows])


def test_c03_perturbative_slope(record_property):
    kappas = np.array([0.01, 0.02, 0.05, 0.1])
    rates = _survival_rates(2, kappas)
    slope = np.polyfit(kappas, rates, 1)[0]
    record_property("detail", f"slope of rate vs kappa = {slope:.4f} (need 0.667 +- 10%)")
    assert slope == pytest.approx(2 / 3, rel=0.1)


@pytest.mark.slow
def test_c04_turnover_and_inverse_regime(record_property):
    parts, ok = [], True
    for n in (2, 3, 4):
        rates = _survival_rates(n, KAPPAS)
        peaks = interior_maxima(rates)
        slope = np.polyfit(np.log(KAPPAS[-3:]), np.log(rates[-3:]), 1)[0]
        parts.append(f"N={n}: {len(peaks)} max at kappa {KAPPAS[peaks[0]]:.3g}, tail slope {slope:.3f}"
                     if peaks else f"N={n}: no interior max")
        ok &= len(peaks) == 1 and abs(slope + 1) <= 0.1
    record_property("detail", "; ".join(parts))
    assert ok


def test_c05_resonance_positions(record_property):
    scan = resonance_scan(ModelSpec.create("TC", 2), tls_state("singly_excited:1", 2).matrix,
                          tls_observable("sz:1", 2), SCAN, 8.0, check=CPTP)
    peaks = scan.peak_positions()
    targets = [m * math.pi / 5 for m in (1, 2, 3)]
    found = [near(peaks, t) for t in targets]
    record_property("detail", f"peaks at {', '.join(f'{p:.4f}' for p in peaks)}; "
                              f"m pi/5 for m=1,2,3 found: {found}")
    assert all(found)


def test_c06_corrected_resonance_rate(record_property):
    parts, ok = [], True
    for kappa in (0.5, 1.0, 2.0):
        scan = resonance_scan(ModelSpec.create("TC", 2, kappa=kappa), tls_state("singly_excited:1", 2).matrix,
                              tls_observable("sz:1", 2), np.linspace(0.4, 0.9, 101), 16.0, check=CPTP)
        i = int(np.argmax(scan.tau_corrected))
        rate = 1 / scan.tau_corrected[i]
        parts.append(f"kappa {kappa}: rate {rate:.4f} = {rate / (kappa / 4):.3f} kappa/4 at dt {scan.dt_grid[i]:.3f}")
        ok &= abs(rate / (kappa / 4) - 1) <= 0.1
    record_property("detail", "; ".join(parts))
    assert ok


def test_c07_fully_excited_resonances(record_property):
    scan = resonance_scan(ModelSpec.create("TC", 2), tls_state("fully_excited", 2).matrix,
                          tls_observable("survival", 2), SCAN, 8.0, check=CPTP)
    peaks = scan.peak_positions()
    unit = math.pi / (10 * math.sqrt(3))
    targets = [2 * m * unit for m in (1, 2, 3)] + [m * unit for m in (1, 3)]
    missing = [round(t, 4) for t in targets if not near(peaks, t)]
    record_property("detail", f"peaks at {', '.join(f'{p:.4f}' for p in peaks)}; missing targets: {missing}")
    assert not missing


def test_c08_closed_form_identity(record_property):
    G = damped_cosine_generator(10.0, 0.25)
    plus = np.full((2, 2), 0.5)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    grid = np.linspace(0.02, 1.0, 50)
    scan = resonance_scan(lambda dt, K: markovian_maps(G, dt, K), plus, sx, grid, 2.0, check=CPTP)
    # the pipeline's time sum carries the k = 0 term, one extra dt
    want = np.array([analytic_damped_cosine_tau(10.0, 0.25, dt) for dt in grid])
    err = float(np.max(np.abs(scan.tau_values - grid - want)))
    record_property("detail", f"max |pipeline - dt - closed form| over 50 steps = {err:.2g}")
    assert err <= 1e-8


def test_c09_moments(record_property):
    num, one = np.diag([0.0, 1.0]), np.diag([0.0, 1.0])
    ratios = []
    for tau in (0.5, 1.0, 3.0):
        series = markovian_maps(single_mode_decay_generator(2, 1 / tau), tau / 100, 5)
        CPTP(series)
        T = transfer_tensors(series)
        rs = steady_state(T, one).matrix
        t_o = relaxation_matrix(T, one, rs).project(num)
        ratios.append((moments(T, one, rs, num, 1) / t_o / tau, moments(T, one, rs, num, 2) / t_o / (2 * tau ** 2)))
    ratios = np.array(ratios)

    T = transfer_tensors(checked_maps(ModelSpec.create("TC", 2), 0.01, 600))
    r0 = tls_state("fully_excited", 2).matrix
    rs = steady_state(T, r0, method="auto").matrix
    sz = tls_observable("sz:1", 2)
    states = ttm_propagate(T, r0, 20000).states
    dev = np.einsum("ij,kji->k", sz, states - states[-1]).real
    k = np.arange(len(dev))
    m1, m2 = np.sum(k * dev) * 0.01 ** 2, np.sum(k * k * dev) * 0.01 ** 3
    rel = (abs(moments(T, r0, rs, sz, 1) / m1 - 1), abs(moments(T, r0, rs, sz, 2) / m2 - 1))
    record_property("detail", f"fixture M1/(tau t_o) in [{ratios[:, 0].min():.4f}, {ratios[:, 0].max():.4f}], "
                              f"M2/(2 tau^2 t_o) in [{ratios[:, 1].min():.4f}, {ratios[:, 1].max():.4f}]; "
                              f"N=2 relative errors {rel[0]:.2g}, {rel[1]:.2g}")
    assert np.all(np.abs(ratios[:, 0] - 1) <= 0.01) and np.all(np.abs(ratios[:, 1] - 1) <= 0.02)
    assert max(rel) <= 1e-3


DISORDER_BASE = ModelSpec.create("TC", 2, omega_c=50.0, omega_tls=45.0)


@pytest.mark.slow
def test_c10_disorder_averaged_ttm(record_property):
    full = tls_state("fully_excited", 2).matrix
    specs = sample_realizations(DisorderSpec(DISORDER_BASE, {"omega_tls": (40, 50)}, 8, 1))
    avg = average_dynamical_maps(specs, 0.05, 60, check=CPTP)
    identity = float(np.max(np.abs(avg.apply(full) - average_density_trajectories(specs, full, 0.05, 60).states)))

    res = run_ensemble(DisorderSpec(DISORDER_BASE, {"omega_tls": (40, 50)}, 50, 1), full, 0.1, 80, 100,
                       trajectory_stride=10, check=CPTP)
    sz = tls_observable("sz:1", 2)
    truth = observable_trajectory(res.averaged_trajectory, None, sz)[::10]
    da = float(np.max(np.abs(observable_trajectory(ttm_propagate(res.da_tensors, full, 100), None, sz) - truth)))
    base = float(np.max(np.abs(observable_trajectory(
        ttm_propagate(res.averaged_tensors, full, 100, max_drift=math.inf), None, sz) - truth)))
    record_property("detail", f"identity error {identity:.2g}; DA-TTM error {da:.3g}; averaged tensors {base:.3g}")
    assert identity <= 1e-10
    assert da <= 1e-2 and base > da


@pytest.mark.slow
def test_c11_disorder_sweep_shape(record_property):
    rows = disorder_rate_sweep(DISORDER_BASE, [0.001, 1.0, 25.0], M=50, seed=1, check=CPTP)
    r = [row["rate"] for row in rows]
    near_ratio, wide_ratio = r[0] / r[1], r[0] / r[2]
    record_property("detail", f"rate(0.001)/rate(1) = {near_ratio:.4f}; rate(0.001)/rate(25) = {wide_ratio:.6f}")
    assert near_ratio == pytest.approx(1, rel=0.05)
    assert wide_ratio >= 2
    assert wide_ratio == pytest.approx(DISORDER_RATIO_25, rel=1e-6)


COMPARISON_PLAN = dict(memory_factor=6)


def _model_rates(kind, omega_c, omega_tls):
    n_cavity = 3 if kind == "TC" else 8
    base = ModelSpec.create(kind, 2, n_cavity=n_cavity, omega_c=omega_c, omega_tls=omega_tls)
    rows = kappa_sweep(base, KAPPAS, tls_state("fully_excited", 2).matrix, tls_observable("sz:1", 2),
                       plan=lambda k: learning_plan(k, **COMPARISON_PLAN), check=CPTP, errors="record")
    return np.array([r["rate"] for r in rows])


@pytest.mark.slow
def test_c12_model_comparison(record_property):
    settings = {"resonant 100": (100.0, 100.0), "resonant 10": (10.0, 10.0), "detuned 15/10": (15.0, 10.0)}
    rates = {(kind, name): _model_rates(kind, *w) for name, w in settings.items() for kind in ("TC", "Dicke", "PF")}
    problems = []
    for key, r in rates.items():
        if np.any(np.isnan(r)):
            problems.append(f"{key[0]} {key[1]}: no rate at kappa {np.round(KAPPAS[np.isnan(r)], 3).tolist()}")
        elif len(interior_maxima(r)) != 1:
            problems.append(f"{key[0]} {key[1]}: {len(interior_maxima(r))} interior maxima")

    weak = KAPPAS <= 1
    spread = max(np.max(np.abs(rates[(m, "resonant 100")][weak] / rates[("TC", "resonant 100")][weak] - 1))
                 for m in ("Dicke", "PF"))
    if not spread <= 0.15:
        problems.append(f"weak coupling spread {spread:.3f}")

    over = slice(-3, None)
    tc, dk, pf = (rates[(m, "resonant 10")][over] for m in ("TC", "Dicke", "PF"))
    if not (np.all(tc > dk) and np.all(tc > pf)):
        problems.append(f"overdamped TC {np.round(tc, 3).tolist()} not above Dicke {np.round(dk, 3).tolist()} "
                        f"and PF {np.round(pf, 3).tolist()}")
    if not np.all(pf < dk):
        problems.append("PF not below Dicke at resonance")
    gap_res = np.max(np.abs(pf / dk - 1))
    gap_det = np.max(np.abs(rates[("PF", "detuned 15/10")][over] / rates[("Dicke", "detuned 15/10")][over] - 1))
    if not gap_det < gap_res:
        problems.append(f"detuning does not bring PF toward Dicke ({gap_det:.3f} vs {gap_res:.3f})")
    record_property("detail", f"weak-coupling spread {spread:.3f}; " + ("; ".join(problems) or "all checks hold"))
    assert not problems


def test_c13_cptp_suite(record_property):
    if CPTP.count == 0:  # run on its own: check a representative set
        for kind in ("TC", "Dicke", "PF"):
            checked_maps(ModelSpec.create(kind, 2, n_cavity=3 if kind == "TC" else 6, omega=10.0), 0.05, 100)
    record_property("detail", f"{CPTP.count} map series; worst trace {CPTP.trace:.2g}, "
                              f"hermiticity {CPTP.herm:.2g}, min Choi eigenvalue {CPTP.choi:.2g}")
    assert CPTP.trace <= 1e-8 and CPTP.herm <= 1e-8 and CPTP.choi >= -1e-7
