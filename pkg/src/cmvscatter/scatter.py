"""Forward scattering: outer functions, the scattering function, phi/psi,
reproducing kernels, and the polynomial-basis asymptotics.

The scattering function is computed as s = -a_{-1} exp(i * conj(log w)),
which is exactly unimodular sample by sample; near-zeros of w only degrade
the phase locally, and the affected nodes are reported so sup-norm checks
can exclude a fixed window around them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import (
    CircleFunction,
    DiskFunction,
    clamped_log,
    conjugate_function,
    default_grid,
    disk_from_boundary,
    outer_boundary_samples,
    outer_from_modulus_squared,
)
from .errors import NumericalError
from .opuc import spectral_density


@dataclass
class ScatteringData:
    """Forward-map output: unimodular s, outer D, and the weight behind them."""

    s: CircleFunction
    D: DiskFunction
    d0: float
    a_minus1: complex
    w: CircleFunction
    clamped: np.ndarray = field(repr=False)

    def excluded_nodes(self, halo=3):
        """Indices within `halo` nodes of a clamped node (circular)."""
        if not self.clamped.any():
            return np.zeros(0, dtype=int)
        n = len(self.clamped)
        bad = np.zeros(n, dtype=bool)
        for j in np.flatnonzero(self.clamped):
            for d in range(-halo, halo + 1):
                bad[(j + d) % n] = True
        return np.flatnonzero(bad)


def forward_scatter(seq, grid=None):
    """Verblunsky coefficients -> (w, D, s) on the grid.

    D comes from the clamped log of w through the conjugate-function
    multiplier; s = -a_{-1} D / D_* is realized as a pure phase so that
    |s| = 1 holds to rounding everywhere, clamped nodes included.
    """
    grid = grid or default_grid()
    w = spectral_density(seq, grid)
    D = outer_from_modulus_squared(w, grid)
    logw, clamped = clamped_log(w.samples.real, warn=False)
    tilde = conjugate_function(CircleFunction(grid, logw))
    s = CircleFunction(grid, -seq.a_minus1 * np.exp(1j * tilde.samples.real))
    return ScatteringData(
        s=s, D=D, d0=float(D.at_zero().real), a_minus1=seq.a_minus1,
        w=w, clamped=clamped,
    )


def scattering_identity_residual(data, halo=3):
    """Max of |s * conj(D) + a_minus1 * D| on the grid, clamp windows excluded."""
    grid = data.s.grid
    d_t = data.D.boundary(grid).samples
    res = np.abs(data.s.samples * np.conj(d_t) + data.a_minus1 * d_t)
    keep = np.ones(grid.size, dtype=bool)
    keep[data.excluded_nodes(halo)] = False
    return float(res[keep].max())


# ---------------------------------------------------------------------------
# phi / psi
# ---------------------------------------------------------------------------

@dataclass
class PhiPsi:
    """Schur-class phi with phi(0)=0 and the outer psi with |psi|^2 = 1-|phi|^2."""

    phi: DiskFunction
    psi: DiskFunction
    phi_boundary: np.ndarray = field(repr=False)
    psi_boundary: np.ndarray = field(repr=False)


def phi_from_R(R, a_minus1, grid=None):
    """phi = conj(a_{-1}) (R(0) - R)/(R(0) + R) and its outer companion psi.

    R must carry the probability normalization R(0) = 1.  The identity
    D = psi / (1 + a_{-1} phi) then reproduces the outer function of
    Re R, which tests check on the grid.
    """
    grid = grid or default_grid()
    if abs(R.at_zero() - 1.0) > 1e-8:
        raise ValueError(f"R(0) must be 1, got {R.at_zero():.6g}")
    r_t = R.boundary(grid).samples
    denom = 1.0 + r_t
    if np.min(np.abs(denom)) < 1e-13:
        raise NumericalError("R(0) + R vanishes on the grid")
    phi_t = np.conj(a_minus1) * (1.0 - r_t) / denom
    phi, _ = disk_from_boundary(phi_t, grid, kind="interior")
    if abs(phi.at_zero()) > 1e-10:
        raise NumericalError(f"phi(0) = {phi.at_zero():.3e}, expected 0")
    coef = np.array(phi.coef)
    coef[0] = 0.0
    phi = DiskFunction(coef, "interior")
    mod = CircleFunction(grid, np.maximum(1.0 - np.abs(phi_t) ** 2, 0.0))
    psi_t = outer_boundary_samples(mod, grid)
    psi, _ = disk_from_boundary(psi_t, grid, kind="interior", max_len=grid.size // 2)
    return PhiPsi(phi=phi, psi=psi, phi_boundary=phi_t, psi_boundary=psi_t)


# ---------------------------------------------------------------------------
# Reproducing kernels
# ---------------------------------------------------------------------------

@dataclass
class KernelPair:
    """The two point-evaluation kernels; each a (interior, exterior) pair."""

    k0: tuple
    kinf: tuple
    grid: object

    def verbk_ratio(self):
        """First-component ratio at the origin; the inverse map reads the
        first coefficient off this quantity."""
        return self.kinf[0].at_zero() / self.k0[0].at_zero()


def kernels_from_spectral(R, D, a_minus1, grid=None):
    """Evaluation kernels assembled from boundary values of R and D.

    Interior halves reproduce F_1(0); exterior halves vanish at infinity.
    The ratio z * (kinf)_1 / (k0)_1 equals phi_from_R's phi.
    """
    grid = grid or default_grid()
    t = grid.nodes
    r_t = R.boundary(grid).samples
    d_t = D.boundary(grid).samples
    d0 = D.at_zero().real
    if np.min(np.abs(d_t)) < 1e-150:
        raise NumericalError("outer function vanishes on the grid")
    k0_1 = (1.0 + r_t) / (2.0 * d_t * d0)
    k0_2 = a_minus1 * (1.0 - np.conj(r_t)) / (2.0 * np.conj(d_t) * d0)
    kinf_1 = np.conj(a_minus1) * (1.0 - r_t) / (2.0 * t * d_t * d0)
    kinf_2 = (1.0 + np.conj(r_t)) / (2.0 * t * np.conj(d_t) * d0)
    k0 = (
        disk_from_boundary(k0_1, grid, kind="interior")[0],
        disk_from_boundary(k0_2, grid, kind="exterior")[0],
    )
    kinf = (
        disk_from_boundary(kinf_1, grid, kind="interior")[0],
        disk_from_boundary(kinf_2, grid, kind="exterior")[0],
    )
    return KernelPair(k0=k0, kinf=kinf, grid=grid)


def kernel_inner(f_pair, g_pair, s):
    """<F, G> in the scattering form: mean of (sF1+F2) conj(sG1+G2)."""
    sf = s.samples * f_pair[0] + f_pair[1]
    sg = s.samples * g_pair[0] + g_pair[1]
    return complex(np.mean(sf * np.conj(sg)))


# ---------------------------------------------------------------------------
# Asymptotics of the Laurent basis
# ---------------------------------------------------------------------------

def szego_asymptotics_residual(seq, n_list, grid=None, basis=None):
    """Grid L2 residuals of the two basis asymptotics.

    Returns [(n, even, odd)] with
      even = || t^-n conj(D) P_{2n} - 1 ||,
      odd  = || t^(n+1) D P_{2n+1} + conj(a_{-1}) ||.
    For support M both stabilize at machine level once 2n >= M + 2.
    """
    from .opuc import laurent_basis

    grid = grid or default_grid()
    n_list = sorted(n_list)
    if basis is None:
        basis = laurent_basis(seq, 2 * max(n_list) + 1, grid=grid)
    data = forward_scatter(seq, grid)
    d_t = data.D.boundary(grid).samples
    t = grid.nodes
    out = []
    for n in n_list:
        even = t ** (-n) * np.conj(d_t) * basis.samples[2 * n] - 1.0
        odd = t ** (n + 1) * d_t * basis.samples[2 * n + 1] + np.conj(seq.a_minus1)
        out.append((
            n,
            float(np.sqrt(np.mean(np.abs(even) ** 2))),
            float(np.sqrt(np.mean(np.abs(odd) ** 2))),
        ))
    return out
