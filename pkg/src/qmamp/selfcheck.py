"""Built-in acceptance checks, runnable as `qmamp selftest` or via pytest.

Each criterion returns a pass/fail result with the worst residual observed
and is bounded by a wall-clock limit.  Randomized checks draw from a fixed
seed so reruns are reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import amplification as amp
from . import groups, ktops, measurement, sterngerlach
from .measurement import clock_rep, sigma_z_rep

SEED = 20240817

ACCEPTANCE_GROUPS = ([2], [3], [4], [2, 2], [6])


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float
    limit: float

    @property
    def ok(self) -> bool:
        return self.passed and self.elapsed < self.limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"[{status}] criterion {self.number:2d} ({self.name}): {self.detail}"
            f" [{self.elapsed:.2f}s / limit {self.limit:.0f}s]"
        )


def _random_state(rng, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _random_hermitian(rng, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def criterion_1_kt_relations() -> tuple[bool, str]:
    worst = 0.0
    for orders in ACCEPTANCE_GROUPS:
        g = groups.make_group(orders)
        pair = ktops.kt_pair(g)
        worst = max(
            worst,
            ktops.verify_pentagonal(pair.W, "w"),
            ktops.verify_pentagonal(pair.V, "v"),
            ktops.verify_intertwining(pair.W, g, "w"),
            ktops.verify_intertwining(pair.V, g, "v"),
        )
    return worst <= 1e-12, f"max pentagonal/intertwining residual {worst:.2e} (tol 1e-12)"


def criterion_2_fourier_conjugation() -> tuple[bool, str]:
    worst = max(
        ktops.kt_pair(groups.make_group(o)).fourier_conjugation_residual()
        for o in ACCEPTANCE_GROUPS
    )
    return worst <= 1e-10, f"max conjugation residual {worst:.2e} (tol 1e-10)"


def _correlation_residual(rep, xi) -> float:
    coupled = measurement.couple(rep, xi).as_tensor()
    expected = np.zeros_like(coupled)
    for chi, p in rep.projections.items():
        expected[:, chi.index] += p @ xi
    return float(np.linalg.norm(coupled - expected))


def criterion_3_perfect_correlation() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for rep in (sigma_z_rep(), clock_rep(3)):
        for _ in range(100):
            xi = _random_state(rng, rep.system_dim)
            worst = max(worst, _correlation_residual(rep, xi))
    return worst <= 1e-12, f"max coupling residual {worst:.2e} over 200 states (tol 1e-12)"


def criterion_4_instrument_equality() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    reps = (sigma_z_rep(), clock_rep(3))
    for i in range(100):
        rep = reps[i % 2]
        chars = rep.group.characters()
        xi = _random_state(rng, rep.system_dim)
        b = _random_hermitian(rng, rep.system_dim)
        mask = rng.integers(0, 2, size=len(chars)).astype(bool)
        delta = measurement.outcome([c for c, m in zip(chars, mask) if m])
        worst = max(
            worst,
            measurement.verify_instrument_equals_coupled_expectation(rep, delta, xi, b),
        )
    return worst <= 1e-12, f"max coupled-vs-projective residual {worst:.2e} (tol 1e-12)"


def criterion_5_amplification() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for rep, n_max in ((sigma_z_rep(), 6), (clock_rep(3), 3)):
        chars = rep.group.characters()
        xi = _random_state(rng, rep.system_dim)
        b = _random_hermitian(rng, rep.system_dim)
        probs = {c: [] for c in chars}
        for n in range(1, n_max + 1):
            cfg = amp.CascadeConfig(rep=rep, n_copies=n)
            mask = rng.integers(0, 2, size=len(chars)).astype(bool)
            delta = measurement.outcome([c for c, m in zip(chars, mask) if m])
            worst = max(worst, amp.check_instrument_equality(cfg, delta, xi, b))
            for c in chars:
                res = amp.amplified_instrument(
                    cfg, measurement.outcome([c]), xi, np.eye(rep.system_dim)
                )
                probs[c].append(res.probability)
        for c in chars:
            expected = float(np.vdot(rep.projection(c) @ xi, rep.projection(c) @ xi).real)
            worst = max(worst, max(abs(p - expected) for p in probs[c]))
            worst = max(worst, max(probs[c]) - min(probs[c]))
    return worst <= 1e-12, f"max N-dependence/equality residual {worst:.2e} (tol 1e-12)"


def criterion_6_intertwiner_chain() -> tuple[bool, str]:
    worst = 0.0
    for g in groups.canonical_groups(8):
        for gamma in g.characters():
            for n in range(1, 5):
                worst = max(worst, amp.intertwiner_chain_check(g, gamma, n))
    return worst <= 1e-12, f"max chain residual {worst:.2e}, |G|<=8, N<=4 (tol 1e-12)"


def criterion_7_measurement_properties() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 3)
    reps = (sigma_z_rep(), clock_rep(3), clock_rep(4))
    violations = 0
    cases = 0
    for i in range(200):
        rep = reps[i % len(reps)]
        chars = rep.group.characters()
        eye = np.eye(rep.system_dim)
        xi = _random_state(rng, rep.system_dim)

        # additivity over a random disjoint split
        mask = rng.integers(0, 2, size=len(chars)).astype(bool)
        d1 = measurement.outcome([c for c, m in zip(chars, mask) if m])
        d2 = measurement.outcome([c for c, m in zip(chars, mask) if not m])
        both = measurement.outcome(chars)
        p1 = measurement.outcome_probability(rep, d1, xi)
        p2 = measurement.outcome_probability(rep, d2, xi)
        pb = measurement.outcome_probability(rep, both, xi)
        cases += 1
        violations += abs(p1 + p2 - pb) > 1e-12

        # normalization
        cases += 1
        violations += abs(pb - 1.0) > 1e-12

        # positivity on a random PSD observable
        a = rng.standard_normal((rep.system_dim, rep.system_dim)) + 1j * rng.standard_normal(
            (rep.system_dim, rep.system_dim)
        )
        psd = a.conj().T @ a
        res = measurement.instrument(rep, d1, xi, psd)
        cases += 1
        violations += res.conditional_expectation.real < -1e-12

        # repeatability of a singleton outcome
        gamma = chars[int(rng.integers(len(chars)))]
        single = measurement.outcome([gamma])
        res = measurement.instrument(rep, single, xi, eye)
        cases += 1
        if res.post_state is not None:
            p_again = float(np.trace(rep.projection(gamma) @ res.post_state).real)
            violations += abs(p_again - 1.0) > 1e-12

        # perfect correlation in the coupled state
        coupled = measurement.couple(rep, xi)
        chi1, chi2 = chars[int(rng.integers(len(chars)))], chars[int(rng.integers(len(chars)))]
        cases += 1
        if chi1 != chi2:
            violations += (
                measurement.joint_probability(rep, coupled, chi1, chi2) > 1e-12
            )
        else:
            pr = measurement.joint_probability(rep, coupled, chi1, chi1)
            expected = float(
                np.vdot(rep.projection(chi1) @ xi, rep.projection(chi1) @ xi).real
            )
            violations += abs(pr - expected) > 1e-12
    return violations == 0, f"{violations} violations in {cases} random property cases"


KICK_SCENARIO = dict(
    b0=1.0, b1=0.5, b2=0.0, mu=1.0, duration=1.0, dt=0.005,
    points=2048, extent=40.0, sigma=1.0,
)


def criterion_8_kick() -> tuple[bool, str]:
    p = KICK_SCENARIO
    field = sterngerlach.FieldModel(b0=p["b0"], b1=p["b1"], b2=p["b2"], mu=p["mu"])
    grid = sterngerlach.gaussian_packet(
        p["points"], p["extent"], sigma=p["sigma"], spinor=(1 / np.sqrt(2), 1 / np.sqrt(2))
    )
    steps = round(p["duration"] / p["dt"])
    result = sterngerlach.run_simulation(grid, field, p["dt"], steps, record_every=10)
    kick_up = sterngerlach.momentum_kick(result.final, result.initial, "up")
    kick_down = sterngerlach.momentum_kick(result.final, result.initial, "down")
    expected = p["mu"] * p["b1"] * p["duration"]

    ok = (
        abs(abs(kick_up) - expected) <= 0.02 * expected
        and abs(abs(kick_down) - expected) <= 0.02 * expected
        and kick_up * kick_down < 0
    )
    # Ehrenfest: fitted d<p_z>/dt per branch vs -/+ mu * b1
    s = result.series
    rate_up = np.polyfit(s.times, s.pz_up, 1)[0]
    rate_down = np.polyfit(s.times, s.pz_down, 1)[0]
    ok = ok and abs(rate_up + p["mu"] * p["b1"]) <= 0.01 * p["mu"] * p["b1"]
    ok = ok and abs(rate_down - p["mu"] * p["b1"]) <= 0.01 * p["mu"] * p["b1"]
    return ok, (
        f"kicks ({kick_up:+.4f}, {kick_down:+.4f}) vs ±{expected}; "
        f"rates ({rate_up:+.4f}, {rate_down:+.4f})"
    )


def load_adiabaticity_reference() -> dict:
    with resources.files("qmamp").joinpath("data/adiabaticity_reference.json").open() as fh:
        return json.load(fh)


def run_adiabaticity_sweep(b2_values, scenario: dict, dt: float | None = None):
    """Flip probability and U_fi for each transverse gradient value."""
    rows = []
    dt = dt if dt is not None else scenario["dt"]
    steps = round(scenario["duration"] / dt)
    for b2 in b2_values:
        field = sterngerlach.FieldModel(
            b0=scenario["b0"], b1=scenario["b1"], b2=b2,
            mu=scenario["mu"], region_extent=scenario["region_extent"],
        )
        grid = sterngerlach.gaussian_packet(
            scenario["points"], scenario["extent"], sigma=scenario["sigma"]
        )
        final = sterngerlach.evolve(grid, field, dt, steps)
        report = sterngerlach.adiabaticity_parameter(
            field, v=scenario["v"], z_scale=scenario["z_scale"]
        )
        rows.append(
            {
                "b2": b2,
                "u_fi": report.u_fi,
                "flip_probability": sterngerlach.spin_flip_probability(final, "up"),
            }
        )
    return rows


def criterion_9_adiabaticity() -> tuple[bool, str]:
    # closed-form substitution check
    f = sterngerlach.FieldModel(b0=1.0, b1=0.0, b2=0.1, mu=10.0, region_extent=10.0)
    report = sterngerlach.adiabaticity_parameter(f, v=1.0, z_scale=1.0)
    if abs(report.u_fi - 1e-3) > 1e-15:
        return False, f"U_fi formula gave {report.u_fi}, expected 1e-3"

    ref = load_adiabaticity_reference()
    rows = run_adiabaticity_sweep(ref["b2_values"], ref["scenario"])
    flips = [r["flip_probability"] for r in rows]
    u_fis = [r["u_fi"] for r in rows]

    ok = flips[0] <= 1e-14
    ok = ok and all(b >= a - 1e-12 for a, b in zip(flips, flips[1:]))
    for u, p in zip(u_fis, flips):
        if u <= 0.01:
            ok = ok and p <= 1e-2
    for p, p_ref in zip(flips, ref["converged_flips"]):
        ok = ok and abs(p - p_ref) <= max(2e-4, 0.05 * p_ref)
    return ok, (
        f"flips {['%.2e' % p for p in flips]} vs converged reference"
        f" (monotone, <=1e-2 in the U_fi<=0.01 regime)"
    )


HYGIENE_DRIFT = dict(
    b0=1.0, b1=0.05, b2=0.0, mu=1.0, dt=1e-3, steps=10_000,
    points=1024, extent=60.0, sigma=2.0,
)
HYGIENE_CONV = dict(
    b0=2.0, b1=0.3, b2=0.4, mu=1.0, duration=1.0,
    points=1024, extent=30.0, sigma=1.0,
)


def criterion_10_solver_hygiene() -> tuple[bool, str]:
    p = HYGIENE_DRIFT
    field = sterngerlach.FieldModel(b0=p["b0"], b1=p["b1"], b2=p["b2"], mu=p["mu"])
    grid = sterngerlach.gaussian_packet(p["points"], p["extent"], sigma=p["sigma"])
    final = sterngerlach.evolve(grid, field, p["dt"], p["steps"], check_every=1000)
    drift = abs(final.norm_squared() - 1.0)
    if drift > 1e-8:
        return False, f"norm drift {drift:.2e} > 1e-8 over {p['steps']} steps"

    q = HYGIENE_CONV
    field = sterngerlach.FieldModel(b0=q["b0"], b1=q["b1"], b2=q["b2"], mu=q["mu"])

    def flip_at(n_steps: int) -> float:
        grid = sterngerlach.gaussian_packet(q["points"], q["extent"], sigma=q["sigma"])
        final = sterngerlach.evolve(grid, field, q["duration"] / n_steps, n_steps)
        return sterngerlach.spin_flip_probability(final, "up")

    ref = flip_at(2048)
    err1 = abs(flip_at(128) - ref)
    err2 = abs(flip_at(256) - ref)
    factor = err1 / err2 if err2 > 0 else float("inf")
    ok = 3.5 <= factor <= 4.5
    return ok, f"norm drift {drift:.2e}; dt-halving error factor {factor:.2f} (want 3.5-4.5)"


CRITERIA = [
    (1, "kt-relations", criterion_1_kt_relations, 5.0),
    (2, "fourier-conjugation", criterion_2_fourier_conjugation, 5.0),
    (3, "perfect-correlation", criterion_3_perfect_correlation, 10.0),
    (4, "instrument-equality", criterion_4_instrument_equality, 10.0),
    (5, "amplification-theorem", criterion_5_amplification, 30.0),
    (6, "intertwiner-chain", criterion_6_intertwiner_chain, 30.0),
    (7, "measurement-properties", criterion_7_measurement_properties, 30.0),
    (8, "stern-gerlach-kick", criterion_8_kick, 60.0),
    (9, "adiabaticity", criterion_9_adiabaticity, 300.0),
    (10, "solver-hygiene", criterion_10_solver_hygiene, 120.0),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn, limit in CRITERIA:
        if num == number:
            start = time.perf_counter()
            passed, detail = fn()
            elapsed = time.perf_counter() - start
            return CriterionResult(num, name, passed, detail, elapsed, limit)
    raise ValueError(f"no criterion {number}")


def run_all(report=print) -> bool:
    all_ok = True
    for num, _, _, _ in CRITERIA:
        result = run_criterion(num)
        report(result.line())
        all_ok = all_ok and result.ok
    return all_ok
