"""Truncated Hankel operators of unimodular symbols and the block solves
behind point evaluation: the outer factor psi_H, the Schur function phi_H,
and the regularity test that decides the one-to-one regime.

Matrix convention: H[k, j] = shat(-(k+j+1)) for the bases {t^j} of the
analytic half and {t^(-(k+1))} of the co-analytic half, so H depends only
on the negative Fourier coefficients of the symbol.  Multiplying the symbol
by t shifts the entries by one anti-diagonal, which the inverse map exploits
by slicing one master coefficient array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .circle import CircleFunction, DiskFunction, default_grid, disk_from_boundary
from .errors import NearSingularError, NumericalError


@dataclass
class HankelOp:
    """Order-M truncation; keeps the symbol's negative coefficients so the
    operator family of shifted symbols comes from one array."""

    order: int
    neg: np.ndarray = field(repr=False)  # neg[m-1] = shat(-m)
    shift: int = 0
    _mat: np.ndarray = field(default=None, repr=False)
    _sigma: float = field(default=None, repr=False)

    @property
    def mat(self):
        if self._mat is None:
            m = self.order
            idx = np.add.outer(np.arange(m), np.arange(m)) + self.shift
            self._mat = self.neg[idx]
            self._mat.setflags(write=False)
        return self._mat

    def shifted(self, n):
        """Hankel operator of the symbol times t^n (exact index shift)."""
        if self.shift + n + 2 * self.order - 1 > len(self.neg):
            raise ValueError(f"shift {n} exceeds the stored coefficient window")
        return HankelOp(self.order, self.neg, self.shift + n)

    def sigma_max(self):
        if self._sigma is None:
            if self.order == 0 or not np.any(self.mat):
                self._sigma = 0.0
            else:
                self._sigma = float(scipy.linalg.svdvals(self.mat)[0])
        return self._sigma

    def frobenius_sq(self):
        return float(np.sum(np.abs(self.mat) ** 2))


def hankel_from_symbol(s, M, max_shift=0):
    """Order-M Hankel matrix of a circle function's negative coefficients.

    Requires the grid to resolve frequencies down to -(2M - 1 + max_shift).
    """
    if isinstance(s, CircleFunction):
        c = s.coeffs()
        n = s.grid.size
        avail = n // 2 - 1
        need = 2 * M - 1 + max_shift
        if need > avail:
            raise ValueError(
                f"grid of size {n} resolves {avail} negative coefficients; "
                f"order {M} with shift {max_shift} needs {need}")
        neg = np.array([c[-m] for m in range(1, avail + 1)])
    else:
        neg = np.asarray(s, dtype=np.complex128)
        if len(neg) < 2 * M - 1 + max_shift:
            raise ValueError(
                f"need {2 * M - 1 + max_shift} negative coefficients, got {len(neg)}")
    return HankelOp(M, neg)


def solve_block(h, rhs="unit_H2", r=1.0):
    """(I - r^2 H*H)^{-1} 1  or  (I - r^2 H H*)^{-1} t-bar by Cholesky.

    At r=1 the gap 1 - sigma_max must exceed 1e-10, otherwise the solve is
    refused with the measured sigma_max attached.
    """
    if rhs not in ("unit_H2", "unit_H2minus"):
        raise ValueError(f"unknown rhs selector {rhs!r}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"radius must lie in (0, 1], got {r}")
    sigma = h.sigma_max()
    if r == 1.0 and 1.0 - sigma <= 1e-10:
        raise NearSingularError(
            f"sigma_max = {sigma:.12g}; the r=1 solve needs sigma_max < 1 - 1e-10",
            sigma_max=sigma)
    m = h.mat
    gram = m.conj().T @ m if rhs == "unit_H2" else m @ m.conj().T
    system = np.eye(h.order) - (r * r) * gram
    e0 = np.zeros(h.order, dtype=np.complex128)
    e0[0] = 1.0
    cho = scipy.linalg.cho_factor(system, lower=True)
    x = scipy.linalg.cho_solve(cho, e0)
    resid = float(np.linalg.norm(system @ x - e0))
    cond_est = 1.0 / max(1.0 - (r * sigma) ** 2, 1e-300)
    if resid > 1e-10 * cond_est:
        raise NumericalError(
            f"block solve residual {resid:.3e} exceeds 1e-10 * condition estimate")
    return x


def _taylor_on_grid(vec, grid):
    """Boundary samples of sum vec[j] t^j on the grid."""
    spec = np.zeros(grid.size, dtype=np.complex128)
    spec[: len(vec)] = vec
    return np.fft.ifft(spec) * grid.size


def psi_h(h, grid=None):
    """(psi_H(0), psi_H) from the analytic-half solve vector.

    psi_H(z) = 1 / (psi_H(0) g(z)) with g the solve vector's Taylor series;
    |g| >= 1 on the closed disk in the regular regime, so the reciprocal is
    well conditioned.  Outer-ness is audited via the log-mean identity.
    """
    grid = grid or default_grid()
    g = solve_block(h, "unit_H2")
    g0 = g[0].real
    psi0 = 1.0 / np.sqrt(g0)
    g_t = _taylor_on_grid(g, grid)
    psi_t = 1.0 / (psi0 * g_t)
    psi, _ = disk_from_boundary(psi_t, grid, kind="interior")
    logmean = float(np.mean(np.log(np.abs(psi_t))))
    defect = abs(abs(psi.at_zero()) - np.exp(logmean))
    if defect > 1e-6:
        raise NumericalError(f"psi_H failed the outer-ness audit: defect {defect:.3e}")
    return float(psi0), psi


def phi_h(h, grid=None):
    """phi_H(z) = z (-H* h)(z)/g(z): the Schur function of the symbol's
    negative coefficients, with phi_H(0) = 0."""
    grid = grid or default_grid()
    g = solve_block(h, "unit_H2")
    hbar = solve_block(h, "unit_H2minus")
    q = -h.mat.conj().T @ hbar
    q_t = _taylor_on_grid(q, grid)
    g_t = _taylor_on_grid(g, grid)
    phi_t = grid.nodes * q_t / g_t
    phi, _ = disk_from_boundary(phi_t, grid, kind="interior")
    coef = np.array(phi.coef)
    coef[0] = 0.0
    phi = DiskFunction(coef, "interior")
    sup = float(np.max(np.abs(phi_t)))
    if sup > 1.0 + 1e-6:
        raise NumericalError(f"phi_H left the Schur class: sup modulus {sup:.8f}")
    return phi


@dataclass
class AakData:
    """Bundle of the point-evaluation solves: g = (I-H*H)^{-1} 1,
    h = (I-HH*)^{-1} t-bar, and the functions they generate."""

    g: np.ndarray
    h: np.ndarray
    psi0: float
    phi: DiskFunction
    psi: DiskFunction


def aak_data(h, grid=None):
    grid = grid or default_grid()
    g = solve_block(h, "unit_H2")
    hbar = solve_block(h, "unit_H2minus")
    psi0, psi = psi_h(h, grid)
    phi = phi_h(h, grid)
    return AakData(g=g, h=hbar, psi0=psi0, phi=phi, psi=psi)


def aak_limit_sweep(h, radii=(0.9, 0.99, 0.999), blowup=1e6):
    """Solve constants along r -> 1 when the r=1 solve is unavailable.

    Returns (values, exists): the limit is declared nonexistent when the
    sweep grows beyond `blowup`.
    """
    values = [float(solve_block(h, "unit_H2", r=r)[0].real) for r in radii]
    return values, values[-1] <= blowup


@dataclass
class RegularityReport:
    regular: bool
    lhs: float          # <(I - H*H)^{-1} 1, 1>
    rhs: float          # 1 / D(0)^2
    sigma_max: float
    converged: bool     # truncation stability between orders M and 2M
    reason: str = ""
    r_sweep: list = None


def regularity_test(seq=None, s=None, d0=None, M=256, grid=None, tol=1e-4):
    """Decide the one-to-one regime: the solve constant must match 1/D(0)^2.

    Accepts either a coefficient sequence (forward-mapped internally) or a
    sampled scattering function with a candidate D(0).  A near-singular
    truncation is reported as regular=False rather than raised.
    """
    grid = grid or default_grid()
    if seq is not None:
        from .scatter import forward_scatter

        data = forward_scatter(seq, grid)
        s, d0 = data.s, data.d0
    if s is None or d0 is None:
        raise ValueError("provide either seq or both s and d0")

    def lhs_at(order):
        h = hankel_from_symbol(s, order)
        sigma = h.sigma_max()
        if 1.0 - sigma <= 1e-8:
            return None, sigma
        return float(solve_block(h, "unit_H2")[0].real), sigma

    lhs, sigma = lhs_at(M)
    rhs = 1.0 / (d0 * d0)
    if lhs is None:
        sweep, exists = aak_limit_sweep(hankel_from_symbol(s, M))
        reason = (f"sigma_max = {sigma:.9g} too close to 1; r-sweep "
                  f"{'bounded' if exists else 'diverges'} at {sweep[-1]:.3g}")
        return RegularityReport(False, float("nan"), rhs, sigma, False,
                                reason=reason, r_sweep=sweep)
    lhs2, _ = lhs_at(2 * M) if 2 * M <= s.grid.size // 4 else (lhs, sigma)
    converged = lhs2 is not None and abs(lhs2 - lhs) <= 10 * tol * max(abs(lhs), 1.0)
    gap = abs(lhs * d0 * d0 - 1.0)
    regular = gap <= tol and sigma < 1.0 - 1e-8
    reason = "" if regular else f"|lhs * D(0)^2 - 1| = {gap:.3e}"
    return RegularityReport(regular, lhs, rhs, sigma, converged, reason)
