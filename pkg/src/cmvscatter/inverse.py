"""Inverse scattering: coefficients back from the scattering function.

The per-order data all comes from one master Hankel matrix: multiplying the
symbol by t^n is an exact index shift, and each shifted operator yields two
dense solves.  The kernel ratio at the origin returns the twisted
coefficient b_n = -conj(a_{-1}) a_n; the unimodular a_{-1} itself is not
visible to the Hankel operator (it only sees negative coefficients), so it
is read off the full scattering samples by the pointwise identity

    a_{-1} = -(s conj(psi) + psi conj(phi)) / (s phi conj(psi) + psi),

where phi, psi are rebuilt from the recovered b's.  A grid mean with a
constancy audit realizes the limit; a non-constant quotient flags the
non-regular regime.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .circle import CircleFunction, outer_boundary_samples
from .errors import NumericalError, RegularityError
from .hankel import hankel_from_symbol, regularity_test, solve_block
from .opuc import VerblunskySeq, schur_function
from .scatter import ScatteringData, forward_scatter


@dataclass
class RecoveryReport:
    a: np.ndarray
    rho: np.ndarray
    a_minus1: complex
    residual: float                 # sup |s_forward - s_input| off clamp windows
    consistency: np.ndarray         # | |a_n|^2 + rho_n^2 - 1 |
    sigma_max: float
    regular: bool
    a_minus1_std: float
    warnings: list = field(default_factory=list)

    def to_json(self, config=None):
        obj = {
            "a_minus1": [self.a_minus1.real, self.a_minus1.imag],
            "a": [[x.real, x.imag] for x in self.a],
            "rho": [float(x) for x in self.rho],
            "residual": float(self.residual),
            "regular": bool(self.regular),
            "consistency": [float(x) for x in self.consistency],
            "sigma_max": float(self.sigma_max),
            "a_minus1_std": float(self.a_minus1_std),
            "warnings": list(self.warnings),
        }
        if config:
            obj["config"] = dict(config)
        return obj


def _kept_nodes(data, halo=3):
    keep = np.ones(data.s.grid.size, dtype=bool)
    keep[data.excluded_nodes(halo)] = False
    return keep


def recover_verblunsky(s, n_max, M, residual_tol=1e-6):
    """Recover a_0..a_{n_max}, the rho ladder, and a_{-1} from samples of s.

    Raises RegularityError when the Hankel truncation is too close to a
    contraction bound of 1 (outside the one-to-one regime); lesser defects
    are reported in the warnings list instead.
    """
    if M < n_max + 64:
        raise ValueError(f"Hankel order {M} too small for n_max {n_max}; need >= {n_max + 64}")
    grid = s.grid
    master = hankel_from_symbol(s, M, max_shift=n_max + 2)
    sigma = master.sigma_max()
    if 1.0 - sigma <= 1e-8:
        raise RegularityError(
            f"sigma_max = {sigma:.9g}: scattering data is not in the one-to-one regime")

    warnings = []
    l_diag = np.empty(n_max + 2)
    b = np.empty(n_max + 1, dtype=np.complex128)
    for n in range(n_max + 2):
        h_n = master.shifted(n)
        u = solve_block(h_n, "unit_H2")
        l_diag[n] = np.sqrt(u[0].real)
        if n <= n_max:
            v = solve_block(h_n, "unit_H2minus")
            b[n] = -(h_n.mat.conj().T @ v)[0] / u[0]
    rho = l_diag[1:] / l_diag[:-1]

    if np.any(np.abs(b) >= 1.0 - 1e-12):
        raise NumericalError(
            f"recovered coefficient modulus reached {np.abs(b).max():.9g}; solver failed")

    # phi, psi from the recovered twisted coefficients
    t = grid.nodes
    phi_t = t * schur_function(b, t)
    psi_t = outer_boundary_samples(
        CircleFunction(grid, np.maximum(1.0 - np.abs(phi_t) ** 2, 0.0)), grid)

    num = -(s.samples * np.conj(psi_t) + psi_t * np.conj(phi_t))
    den = s.samples * phi_t * np.conj(psi_t) + psi_t
    lam = np.sum(num * np.conj(den)) / max(np.sum(np.abs(den) ** 2), 1e-300)
    if abs(lam) < 1e-6:
        lam = -1.0 + 0.0j
        warnings.append("a_minus1 not identifiable from s; defaulted to -1 (non-unique data)")
    lam /= abs(lam)

    # polish a_minus1 with the forward Szego function of the recovered sequence
    a_minus1_std = float("inf")
    data = None
    for _ in range(4):
        a = -lam * b
        if np.any(np.abs(a) >= 1.0 - 1e-12):
            raise NumericalError("recovered |a_n| reached 1; solver failed")
        seq = VerblunskySeq(a_minus1=lam, a=tuple(a))
        data = forward_scatter(seq, grid)
        keep = _kept_nodes(data)
        d_t = data.D.boundary(grid).samples
        vals = -s.samples[keep] * np.conj(d_t[keep]) / d_t[keep]
        mean = np.mean(vals)
        if abs(mean) < 1e-6:
            a_minus1_std = float(np.std(vals))
            break
        lam_new = mean / abs(mean)
        a_minus1_std = float(np.std(vals))
        if abs(lam_new - lam) < 1e-12:
            lam = lam_new
            break
        lam = lam_new
    if a_minus1_std > 1e-4:
        warnings.append(
            f"a_minus1 quotient not constant on the grid (std {a_minus1_std:.3e}); "
            "data behaves non-regular")

    a = -lam * b
    seq = VerblunskySeq(a_minus1=lam, a=tuple(a))
    data = forward_scatter(seq, grid)
    keep = _kept_nodes(data)
    residual = float(np.max(np.abs(data.s.samples[keep] - s.samples[keep])))
    consistency = np.abs(np.abs(a) ** 2 + rho[: n_max + 1] ** 2 - 1.0)
    if np.max(consistency) > 1e-4:
        warnings.append(
            f"coefficient/rho consistency gap {np.max(consistency):.3e} exceeds 1e-4")
    regular = (1.0 - sigma > 1e-8) and residual <= residual_tol
    return RecoveryReport(
        a=a, rho=rho[: n_max + 1], a_minus1=complex(lam), residual=residual,
        consistency=consistency, sigma_max=sigma, regular=regular,
        a_minus1_std=a_minus1_std, warnings=warnings,
    )


# ---------------------------------------------------------------------------
# GLM transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlmMatrix:
    """Lower-triangular change of basis, columns from normalized kernels."""

    order: int
    mat: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.mat.setflags(write=False)

    @property
    def diag(self):
        return np.diag(self.mat)


def _as_scattering(source, grid=None):
    if isinstance(source, ScatteringData):
        return source
    if isinstance(source, VerblunskySeq):
        return forward_scatter(source, grid)
    raise TypeError(f"expected VerblunskySeq or ScatteringData, got {type(source)!r}")


def glm_matrix(source, m, M, grid=None, check_regular=True):
    """Columns of the GLM transform in the alternating monomial basis.

    Column 2k comes from the analytic-half solve of the 2k-shifted symbol,
    column 2k+1 from the co-analytic half with the -a_{-1} phase; the
    diagonal is rho_0...rho_{n-1}/D(0) up to that phase.
    """
    data = _as_scattering(source, grid)
    if check_regular:
        rep = regularity_test(s=data.s, d0=data.d0, M=M)
        if not rep.regular:
            raise RegularityError(f"GLM transform needs the regular regime: {rep.reason}")
    master = hankel_from_symbol(data.s, M, max_shift=m)
    out = np.zeros((m, m), dtype=np.complex128)
    for col in range(m):
        h_n = master.shifted(col)
        if col % 2 == 0:
            k = col // 2
            u = solve_block(h_n, "unit_H2")
            norm = np.sqrt(u[0].real)
            first = u / norm                     # coefficient j -> row 2(k+j)
            second = -(h_n.mat @ u) / norm       # coefficient l -> row 2(k+l)+1
            for j, val in enumerate(first):
                r = 2 * (k + j)
                if r < m:
                    out[r, col] = val
            for l, val in enumerate(second):
                r = 2 * (k + l) + 1
                if r < m:
                    out[r, col] = val
        else:
            k = (col - 1) // 2
            v = solve_block(h_n, "unit_H2minus")
            q = -(h_n.mat.conj().T @ v)
            norm = np.sqrt(v[0].real)
            phase = -data.a_minus1
            for j, val in enumerate(q):
                r = 2 * (k + 1 + j)
                if r < m:
                    out[r, col] = phase * val / norm
            for l, val in enumerate(v):
                r = 2 * (k + l) + 1
                if r < m:
                    out[r, col] = phase * val / norm
    return GlmMatrix(m, out)


def glm_factorization_residual(source, m, M, grid=None):
    """Relative Frobenius gap between the reordered block-inverse and GLM * GLM^*."""
    data = _as_scattering(source, grid)
    glm = glm_matrix(data, m, M)
    h = hankel_from_symbol(data.s, M).mat
    big = np.zeros((2 * M, 2 * M), dtype=np.complex128)
    big[:M, :M] = np.eye(M)
    big[M:, M:] = np.eye(M)
    big[:M, M:] = h.conj().T
    big[M:, :M] = h
    binv = np.linalg.inv(big)
    idx = np.array([r // 2 if r % 2 == 0 else M + r // 2 for r in range(m)])
    lhs = binv[np.ix_(idx, idx)]
    rhs = glm.mat @ glm.mat.conj().T
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def l_matrix(source, m, M, grid=None):
    """Analytic-half triangular factor: L^n_n = sqrt(<(I-H*H)^{-1} 1, 1>) of
    the n-shifted symbol, with (I-H*H)^{-1} = L L^* on the leading block.

    Accepts a sequence, ScatteringData, or a sampled s directly (a_{-1} is
    not involved).  Returns (L, residual of the factorization identity).
    """
    if isinstance(source, CircleFunction):
        s = source
    else:
        s = _as_scattering(source, grid).s
    master = hankel_from_symbol(s, M, max_shift=m)
    out = np.zeros((m, m), dtype=np.complex128)
    for n in range(m):
        u = solve_block(master.shifted(n), "unit_H2")
        norm = np.sqrt(u[0].real)
        top = min(m - n, len(u))
        out[n: n + top, n] = u[:top] / norm
    h = master.mat
    system = np.eye(M) - h.conj().T @ h
    cho = scipy.linalg.cho_factor(system, lower=True)
    inv = scipy.linalg.cho_solve(cho, np.eye(M, dtype=np.complex128))
    lead = inv[:m, :m]
    rhs = out @ out.conj().T
    residual = float(np.linalg.norm(lead - rhs) / np.linalg.norm(rhs))
    return out, residual
