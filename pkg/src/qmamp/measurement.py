"""Spectral families, the perfect-correlation coupling, and the instrument.

A `SpectralRepresentation` assigns an orthogonal projection on the system
space to each character of the measured group; the reconstructed group
unitaries are U_u = sum_chi conj(chi(u)) E(chi).  The instrument is the
projective operation-valued measure
I(Delta)(B) = sum_{chi in Delta} <xi| E(chi) B E(chi) |xi>, whose value at the
identity is the outcome probability and whose normalized operation gives the
post-measurement density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import Character, FiniteAbelianGroup
from .hilbert import StateVector, basis_state, leg_space
from .ktops import build_UtildeV


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralRepresentation:
    group: FiniteAbelianGroup
    system_dim: int
    projections: dict[Character, np.ndarray]

    def projection(self, chi: Character) -> np.ndarray:
        p = self.projections.get(chi)
        if p is None:
            return np.zeros((self.system_dim, self.system_dim), dtype=complex)
        return p

    def spectrum(self, tol: float = 1e-12) -> list[Character]:
        """Characters carrying a nonzero projection."""
        return [chi for chi, p in self.projections.items() if np.linalg.norm(p) > tol]

    def unitary(self, u) -> np.ndarray:
        out = np.zeros((self.system_dim, self.system_dim), dtype=complex)
        for chi, p in self.projections.items():
            out += np.conj(chi.value(u)) * p
        return out


def make_spectral_rep(group, system_dim, assignments, tol=1e-10) -> SpectralRepresentation:
    """Validate (character, projection) assignments into a spectral family.

    Requires: each matrix a hermitian idempotent, pairwise orthogonality, and
    completeness sum E(chi) = I.  Characters not listed get the zero projection.
    """
    projections: dict[Character, np.ndarray] = {}
    for chi, mat in assignments:
        if chi.group != group:
            raise MeasurementError("character belongs to a different group")
        mat = np.array(mat, dtype=complex)
        if mat.shape != (system_dim, system_dim):
            raise MeasurementError(
                f"projection shape {mat.shape} does not match system dim {system_dim}"
            )
        if np.linalg.norm(mat - mat.conj().T) > tol:
            raise MeasurementError(f"assignment for {chi.exponents} is not hermitian")
        if np.linalg.norm(mat @ mat - mat) > tol:
            raise MeasurementError(f"assignment for {chi.exponents} is not idempotent")
        if chi in projections:
            raise MeasurementError(f"duplicate assignment for {chi.exponents}")
        mat.setflags(write=False)
        projections[chi] = mat

    items = list(projections.items())
    for i, (chi1, p1) in enumerate(items):
        for chi2, p2 in items[i + 1 :]:
            if np.linalg.norm(p1 @ p2) > tol:
                raise MeasurementError(
                    f"projections for {chi1.exponents} and {chi2.exponents} overlap"
                )
    total = sum((p for _, p in items), np.zeros((system_dim, system_dim), dtype=complex))
    if np.linalg.norm(total - np.eye(system_dim)) > tol:
        raise MeasurementError("projections do not sum to the identity")
    return SpectralRepresentation(group, system_dim, projections)


@dataclass(frozen=True)
class Outcome:
    characters: frozenset[Character]

    def __contains__(self, chi: Character) -> bool:
        return chi in self.characters


def outcome(chars) -> Outcome:
    return Outcome(frozenset(chars))


@dataclass(frozen=True)
class InstrumentResult:
    probability: float
    conditional_expectation: complex
    post_state: np.ndarray | None  # density matrix; None for zero-probability outcomes


def _check_state(rep: SpectralRepresentation, xi) -> np.ndarray:
    if isinstance(xi, StateVector):
        xi = xi.amplitudes
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (rep.system_dim,):
        raise MeasurementError(f"state shape {xi.shape} vs system dim {rep.system_dim}")
    if abs(np.linalg.norm(xi) - 1.0) > 1e-9:
        raise MeasurementError("state is not normalized")
    return xi


def coupled_space(rep: SpectralRepresentation):
    return leg_space(("sys", rep.system_dim), ("probe", rep.group.size))


def couple(rep: SpectralRepresentation, xi, probe_init: Character | None = None) -> StateVector:
    """Apply the coupling unitary to xi x |probe_init> (default: trivial character).

    The output is sum_chi c_chi xi_chi x |chi * probe_init>: perfect correlation
    between system sectors and probe labels.
    """
    xi = _check_state(rep, xi)
    if probe_init is None:
        probe_init = rep.group.trivial_character
    utv = build_UtildeV(rep)
    joint = np.kron(xi, _one_hot(rep.group.size, probe_init.index))
    return StateVector(coupled_space(rep), utv.matrix @ joint)


def _one_hot(n: int, i: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


def instrument(rep: SpectralRepresentation, delta: Outcome, xi, b: np.ndarray) -> InstrumentResult:
    """Projective instrument: probabilities, conditional expectation, post state."""
    xi = _check_state(rep, xi)
    b = np.asarray(b, dtype=complex)
    if b.shape != (rep.system_dim, rep.system_dim):
        raise MeasurementError(f"observable shape {b.shape} vs system dim {rep.system_dim}")

    prob = 0.0
    cond = 0.0 + 0.0j
    rho = np.zeros((rep.system_dim, rep.system_dim), dtype=complex)
    for chi in delta.characters:
        p = rep.projection(chi)
        pxi = p @ xi
        prob += float(np.vdot(pxi, pxi).real)
        cond += complex(np.vdot(pxi, b @ pxi))
        rho += np.outer(pxi, pxi.conj())
    if prob > 1e-300:
        post = rho / prob
    else:
        post = None
        prob = 0.0
    return InstrumentResult(probability=prob, conditional_expectation=cond, post_state=post)


def outcome_probability(rep, delta: Outcome, xi) -> float:
    return instrument(rep, delta, xi, np.eye(rep.system_dim)).probability


def verify_instrument_equals_coupled_expectation(rep, delta: Outcome, xi, b) -> float:
    """|projective-sum instrument - coupled-picture expectation| using the
    explicit coupling unitary and the probe indicator of delta."""
    xi = _check_state(rep, xi)
    b = np.asarray(b, dtype=complex)
    coupled = couple(rep, xi)
    indicator = np.zeros(rep.group.size)
    for chi in delta.characters:
        indicator[chi.index] = 1.0
    big = np.kron(b, np.diag(indicator).astype(complex))
    lhs = complex(np.vdot(coupled.amplitudes, big @ coupled.amplitudes))
    rhs = instrument(rep, delta, xi, b).conditional_expectation
    return abs(lhs - rhs)


def joint_probability(rep, coupled: StateVector, chi_sys: Character, chi_probe: Character) -> float:
    """P(system in range E(chi_sys), probe at chi_probe) in a coupled state."""
    t = coupled.as_tensor()
    branch = t[:, chi_probe.index]
    p = rep.projection(chi_sys)
    return float(np.vdot(p @ branch, p @ branch).real)


def sigma_z_rep(group: FiniteAbelianGroup | None = None) -> SpectralRepresentation:
    """Two-level preset: trivial character -> |0><0|, the other -> |1><1|,
    so the reconstructed U at the generator is diag(1, -1)."""
    from .groups import make_group

    if group is None:
        group = make_group([2])
    if group.size != 2:
        raise MeasurementError("two-level preset needs a group of size 2")
    chars = group.characters()
    e0 = np.diag([1.0, 0.0]).astype(complex)
    e1 = np.diag([0.0, 1.0]).astype(complex)
    return make_spectral_rep(group, 2, [(chars[0], e0), (chars[1], e1)])


def clock_rep(n: int = 3) -> SpectralRepresentation:
    """n-level preset over Z_n: E(chi_k) = |k><k|; U at the generator is the
    conjugate clock matrix diag(1, w^-1, ..., w^-(n-1))."""
    from .groups import make_group

    group = make_group([n])
    assignments = []
    for k, chi in enumerate(group.characters()):
        e = np.zeros((n, n), dtype=complex)
        e[k, k] = 1.0
        assignments.append((chi, e))
    return make_spectral_rep(group, n, assignments)
