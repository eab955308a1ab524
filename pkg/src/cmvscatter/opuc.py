"""Verblunsky sequences, CMV matrices, Schur recursion, Laurent basis.

The spectral-density oracle is the Schur algorithm run backward on the
coefficients a_0..a_{M-1}: exact for finitely supported sequences and
O(M*N), so it is the ground truth for every forward map in this package.
The density depends only on a_0, a_1, ...; the unimodular a_{-1} enters the
scattering function and the phases of the orthonormal Laurent basis.

Convention note (conjugation calibration, documented once here): the
five-diagonal matrix is built verbatim from the user's coefficients, while
the Laurent-basis recursion runs on the twisted coefficients
-a_{-1} * conj(a_k).  With that twist the basis is orthonormal for the
density produced by the Schur oracle, the leading coefficients are
1/(rho_0...rho_{2n-1}) and -conj(a_{-1})/(rho_0...rho_{2n}), and the
kernel-ratio identity used by the inverse map reads
ratio_n = -conj(a_{-1}) * a_n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .circle import CircleFunction, default_grid, disk_from_boundary
from .errors import NumericalError


@dataclass(frozen=True)
class VerblunskySeq:
    """Finitely supported coefficients |a_k| < 1 plus unimodular a_minus1."""

    a_minus1: complex
    a: tuple = ()

    def __post_init__(self):
        a_minus1 = complex(self.a_minus1)
        a = tuple(complex(x) for x in self.a)
        if abs(abs(a_minus1) - 1.0) > 1e-12:
            raise ValueError(f"|a_minus1| must be 1, got {abs(a_minus1):.15g}")
        for k, ak in enumerate(a):
            if abs(ak) > 1.0 - 1e-12:
                raise ValueError(f"|a_{k}| must stay below 1, got {abs(ak):.15g}")
        object.__setattr__(self, "a_minus1", a_minus1)
        object.__setattr__(self, "a", a)

    @property
    def support(self):
        return len(self.a)

    def coeff(self, k):
        """a_k, zero past the support."""
        return self.a[k] if k < len(self.a) else 0.0 + 0.0j

    def rho(self, k=None):
        if k is not None:
            return float(np.sqrt(1.0 - abs(self.coeff(k)) ** 2))
        return np.sqrt(1.0 - np.abs(np.asarray(self.a)) ** 2) if self.a else np.array([])

    def to_json(self):
        return {
            "a_minus1": [self.a_minus1.real, self.a_minus1.imag],
            "a": [[x.real, x.imag] for x in self.a],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        am1 = obj["a_minus1"]
        return cls(
            a_minus1=complex(am1[0], am1[1]),
            a=tuple(complex(x[0], x[1]) for x in obj["a"]),
        )


def schur_function(params, z):
    """Schur function with parameters `params` by backward recursion,
    evaluated at the points z (on or inside the circle)."""
    z = np.asarray(z, dtype=np.complex128)
    f = np.zeros_like(z)
    for ak in reversed(list(params)):
        zf = z * f
        f = (ak + zf) / (1.0 + np.conj(ak) * zf)
    return f


def schur_caratheodory(seq, grid=None):
    """Herglotz function R = (1 + z f)/(1 - z f) of the Schur function f
    with parameters a_0..a_{M-1}; R(0) = 1.  Returned as a DiskFunction."""
    grid = grid or default_grid()
    t = grid.nodes
    f = schur_function(seq.a, t)
    r_boundary = (1.0 + t * f) / (1.0 - t * f)
    R, _ = disk_from_boundary(r_boundary, grid, kind="interior")
    return R


def spectral_density(seq, grid=None):
    """Spectral density w = Re R on the grid; integrates to 1.

    Computed as (1 - |tf|^2)/|1 - tf|^2 for positivity down to rounding.
    The density does not involve a_minus1.
    """
    grid = grid or default_grid()
    t = grid.nodes
    zf = t * schur_function(seq.a, t)
    w = (1.0 - np.abs(zf) ** 2) / np.abs(1.0 - zf) ** 2
    return CircleFunction(grid, w)


# ---------------------------------------------------------------------------
# CMV matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CmvMatrix:
    """Leading n-by-n truncation of the five-diagonal unitary product."""

    dim: int
    mat: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.mat.setflags(write=False)


def _block_factors(seq, nbig):
    """The two block-diagonal factors on nbig coordinates (nbig even)."""
    a0 = np.zeros((nbig, nbig), dtype=np.complex128)
    a1 = np.zeros((nbig, nbig), dtype=np.complex128)
    for k in range(0, nbig - 1, 2):
        ak = seq.coeff(k)
        rk = seq.rho(k)
        a0[k, k] = ak
        a0[k, k + 1] = rk
        a0[k + 1, k] = rk
        a0[k + 1, k + 1] = -np.conj(ak)
    a1[0, 0] = -np.conj(seq.a_minus1)
    for k in range(1, nbig - 1, 2):
        ak = seq.coeff(k)
        rk = seq.rho(k)
        a1[k, k] = ak
        a1[k, k + 1] = rk
        a1[k + 1, k] = rk
        a1[k + 1, k + 1] = -np.conj(ak)
    return a0, a1


def build_cmv(seq, n):
    """n-by-n leading block of the (doubly infinite-in-index) product.

    The extra working coordinates guarantee every returned entry equals the
    entry of the untruncated product, so interior columns are exactly
    orthonormal.
    """
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    nbig = n + 4 + (n % 2)
    a0, a1 = _block_factors(seq, nbig)
    prod = a1 @ a0
    return CmvMatrix(n, prod[:n, :n].copy())


def cmv_inverse_truncation(seq, n):
    """n-by-n leading block of the inverse (the adjoint-factor product)."""
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    nbig = n + 4 + (n % 2)
    a0, a1 = _block_factors(seq, nbig)
    prod = a0.conj().T @ a1.conj().T
    return CmvMatrix(n, prod[:n, :n].copy())


def cmv_recursion_check(seq, n):
    """Max residual of the two coupled shift identities on basis vectors.

    Both identities are evaluated for all block indices that stay inside the
    truncation window; the contract is residual <= 1e-12.
    """
    if n < 2 * seq.support + 4:
        raise ValueError(
            f"dimension {n} too small; need at least {2 * seq.support + 4}")
    mat = build_cmv(seq, n).mat
    inv = cmv_inverse_truncation(seq, n).mat

    def e(i):
        v = np.zeros(n, dtype=np.complex128)
        v[i] = 1.0
        return v

    worst = 0.0
    for k in range(0, (n - 4) // 2):
        i = 2 * k
        # inverse identity: A^-1 { rho_{2k-1} e_{2k-1} - conj(a_{2k-1}) e_{2k} }
        #                  = conj(a_{2k}) e_{2k} + rho_{2k} e_{2k+1}
        if k == 0:
            lhs_vec = -np.conj(seq.a_minus1) * e(0)
        else:
            lhs_vec = seq.rho(i - 1) * e(i - 1) - np.conj(seq.coeff(i - 1)) * e(i)
        res = inv @ lhs_vec - (np.conj(seq.coeff(i)) * e(i) + seq.rho(i) * e(i + 1))
        worst = max(worst, float(np.max(np.abs(res))))
        # forward identity: A { rho_{2k} e_{2k} - a_{2k} e_{2k+1} }
        #                  = a_{2k+1} e_{2k+1} + rho_{2k+1} e_{2k+2}
        lhs_vec = seq.rho(i) * e(i) - seq.coeff(i) * e(i + 1)
        res = mat @ lhs_vec - (seq.coeff(i + 1) * e(i + 1) + seq.rho(i + 1) * e(i + 2))
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def cmv_first_return(seq, n=8):
    """<A^{-1} e_0, e_0> from the truncated inverse; equals -a_minus1 * conj(a_0)."""
    return complex(cmv_inverse_truncation(seq, n).mat[0, 0])


# ---------------------------------------------------------------------------
# Laurent polynomials and the CMV orthonormal basis
# ---------------------------------------------------------------------------

class Laurent:
    """Laurent polynomial sum coef[i] t^(lo+i), with exact coefficient ops."""

    __slots__ = ("lo", "coef")

    def __init__(self, lo, coef):
        self.lo = int(lo)
        self.coef = np.asarray(coef, dtype=np.complex128)

    @property
    def hi(self):
        return self.lo + len(self.coef) - 1

    def coeff(self, e):
        i = e - self.lo
        if 0 <= i < len(self.coef):
            return complex(self.coef[i])
        return 0.0 + 0.0j

    def shift(self, by):
        return Laurent(self.lo + by, self.coef)

    def __mul__(self, scalar):
        return Laurent(self.lo, self.coef * scalar)

    __rmul__ = __mul__

    def __sub__(self, other):
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        out[self.lo - lo: self.lo - lo + len(self.coef)] += self.coef
        out[other.lo - lo: other.lo - lo + len(other.coef)] -= other.coef
        return Laurent(lo, out)

    def sample(self, nodes):
        out = np.zeros_like(nodes, dtype=np.complex128)
        for i, c in enumerate(self.coef):
            out += c * nodes ** (self.lo + i)
        return out


@dataclass
class LaurentBasis:
    """Orthonormal Laurent system P_0..P_m for the spectral density."""

    polys: list
    leading: np.ndarray
    samples: np.ndarray
    gram_residual: float


def laurent_basis(seq, m, w=None, grid=None, gram_tol=1e-6):
    """P_0..P_m by the coupled recursion, with an orthonormality audit.

    Runs on the twisted coefficients -a_{-1} conj(a_k) (see module note), so
    the system is orthonormal under w*dm for w = spectral_density(seq).
    Raises NumericalError if the Gram residual exceeds gram_tol.
    """
    grid = grid or default_grid()
    if m > grid.size // 4:
        raise ValueError(f"basis order {m} too large for grid size {grid.size}")
    if w is None:
        w = spectral_density(seq, grid)

    am1 = seq.a_minus1
    twisted = lambda k: -am1 * np.conj(seq.coeff(k))
    rho = seq.rho

    polys = [Laurent(0, [1.0])]
    # P_1 from the n=0 inverse identity with rho_{-1} = 0
    p1 = (Laurent(-1, [-np.conj(am1)]) - Laurent(0, [np.conj(twisted(0))])) * (1.0 / rho(0))
    polys.append(p1)
    n = 0
    while len(polys) <= m:
        p_even, p_odd = polys[2 * n], polys[2 * n + 1]
        # t { rho_{2n} P_{2n} - A_{2n} P_{2n+1} } = A_{2n+1} P_{2n+1} + rho_{2n+1} P_{2n+2}
        nxt = ((rho(2 * n) * p_even - twisted(2 * n) * p_odd).shift(1)
               - twisted(2 * n + 1) * p_odd) * (1.0 / rho(2 * n + 1))
        polys.append(nxt)
        if len(polys) > m:
            break
        n += 1
        # t^{-1} { rho_{2n-1} P_{2n-1} - conj(A_{2n-1}) P_{2n} } =
        #       conj(A_{2n}) P_{2n} + rho_{2n} P_{2n+1}
        p_odd, p_even = polys[2 * n - 1], polys[2 * n]
        nxt = ((rho(2 * n - 1) * p_odd - np.conj(twisted(2 * n - 1)) * p_even).shift(-1)
               - np.conj(twisted(2 * n)) * p_even) * (1.0 / rho(2 * n))
        polys.append(nxt)
    polys = polys[: m + 1]

    leading = np.empty(m + 1, dtype=np.complex128)
    for k, p in enumerate(polys):
        top = k // 2 if k % 2 == 0 else -(k // 2 + 1)
        leading[k] = p.coeff(top)

    samples = np.vstack([p.sample(grid.nodes) for p in polys])
    weighted = samples * w.samples.real[None, :]
    gram = weighted @ samples.conj().T / grid.size
    gram_residual = float(np.max(np.abs(gram - np.eye(m + 1))))
    if gram_residual > gram_tol:
        raise NumericalError(
            f"Laurent basis lost orthonormality: Gram residual {gram_residual:.3e}")
    return LaurentBasis(polys, leading, samples, gram_residual)


def gram_schmidt_basis(seq, m, grid=None):
    """Independent oracle: Cholesky orthonormalization of 1, 1/t, t, 1/t^2, ...

    Moment matrix entries come from the Fourier coefficients of the density,
    and the triangular solve fixes positive leading coefficients; the CMV
    phase convention is restored with powers of -conj(a_minus1).
    """
    grid = grid or default_grid()
    w = spectral_density(seq, grid)
    exps = [0]
    for k in range(1, m + 1):
        exps.append(-(k // 2 + 1) if k % 2 == 1 else k // 2)
    wc = w.coeffs()
    n = grid.size
    moments = np.empty((m + 1, m + 1), dtype=np.complex128)
    for i, ei in enumerate(exps):
        for j, ej in enumerate(exps):
            moments[i, j] = wc[(ej - ei) % n]
    low = np.linalg.cholesky(moments)
    # coefficient columns T must satisfy T^T G conj(T) = I, so T = inv(L^T)
    trans = np.linalg.inv(low.T)
    phases = np.array([(-np.conj(seq.a_minus1)) ** (k % 2) for k in range(m + 1)])
    polys = []
    for k in range(m + 1):
        poly = Laurent(0, [0.0])
        for i in range(k + 1):
            poly = poly - Laurent(exps[i], [-phases[k] * trans[i, k]])
        polys.append(poly)
    return polys, exps
