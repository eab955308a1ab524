"""Class-membership diagnostics and the determinant identity.

Divergence of the desk-scale sums is decided by the window-doubling rule:
a sum is declared divergent when doubling the coefficient window grows it
by more than 10 percent.  That is crude but honest at this scale, and the
raw windowed values are always reported next to the flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import CircleFunction, CircleGrid, default_grid
from .errors import NumericalError, RegularityError
from .hankel import hankel_from_symbol, regularity_test
from .opuc import VerblunskySeq, spectral_density
from .scatter import forward_scatter

WINDOW_GROWTH_LIMIT = 0.10

#: Below this many coefficients the tail is identically zero by type and the
#: window-doubling heuristic is meaningless noise.
MIN_WINDOW_SUPPORT = 16


def besov_half_norm(f):
    """sum_k |k| |c_k|^2 over the available frequency window.

    Accepts a CircleFunction or a coefficient array in numpy.fft layout.
    """
    c = f.coeffs() if isinstance(f, CircleFunction) else np.asarray(f, dtype=np.complex128)
    n = len(c)
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    return float(np.sum(k * np.abs(c) ** 2))


def _windowed_besov(f):
    """(full-window value, growth fraction when the window doubles)."""
    c = f.coeffs() if isinstance(f, CircleFunction) else np.asarray(f, np.complex128)
    n = len(c)
    k = np.fft.fftfreq(n, d=1.0 / n)
    term = np.abs(k) * np.abs(c) ** 2
    half = float(np.sum(term[np.abs(k) <= n // 4]))
    full = float(np.sum(term))
    growth = (full - half) / half if half > 0 else 0.0
    return full, growth


def _windowed_coeff_sum(a, weight_by_index):
    """Windowed sum over a finite coefficient list, with the doubling audit.

    Short lists (tail exactly zero by construction) are never flagged.
    """
    a = np.asarray(a)
    mags = np.abs(a) ** 2
    if weight_by_index:
        mags = np.arange(len(a)) * mags
    full = float(np.sum(mags))
    if len(a) < MIN_WINDOW_SUPPORT or full == 0.0:
        return full, 0.0
    half = float(np.sum(mags[: len(a) // 2]))
    growth = (full - half) / half if half > 0 else float("inf")
    return full, growth


def winding_index(s, r=0.95, min_modulus=0.1):
    """Winding number of the harmonic extension s(r t) around the origin.

    When the extension passes too close to 0 the radius is retried at
    {0.9, 0.8} and then closer to 1 (the limit defining the index; for
    smooth data the extension tends to the unimodular s itself there).
    """
    if np.max(np.abs(np.abs(s.samples) - 1.0)) > 1e-6:
        raise ValueError("winding_index expects a unimodular function")
    n = s.grid.size
    c = s.coeffs()
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    for radius in (r, 0.9, 0.8, 0.99, 0.999):
        ext = np.fft.ifft(c * radius ** k) * n
        if np.min(np.abs(ext)) > min_modulus:
            ang = np.unwrap(np.angle(np.concatenate([ext, ext[:1]])))
            turns = (ang[-1] - ang[0]) / (2.0 * np.pi)
            wind = int(np.rint(turns))
            if abs(turns - wind) > 0.1:
                raise ValueError(f"winding did not close to an integer: {turns:.6f}")
            return wind
    raise ValueError("harmonic extension passes near 0 at every trial radius")


def a2_constant(w, min_arc=8):
    """Dyadic-arc scan of <w>_I <1/w>_I; a lower bound of the true supremum.

    Arcs run over every translate at lengths N/2, N/4, ..., min_arc nodes.
    """
    ws = w.samples.real
    if np.any(ws <= 0):
        raise ValueError(f"weight must be positive on the grid (min {ws.min():.3e})")
    n = w.grid.size
    cw = np.concatenate([[0.0], np.cumsum(np.tile(ws, 2))])
    cv = np.concatenate([[0.0], np.cumsum(np.tile(1.0 / ws, 2))])
    best = 0.0
    length = n // 2
    while length >= min_arc:
        i = np.arange(n)
        mean_w = (cw[i + length] - cw[i]) / length
        mean_v = (cv[i + length] - cv[i]) / length
        best = max(best, float(np.max(mean_w * mean_v)))
        length //= 2
    return best


def widom_det(seq, m_list, grid=None):
    """det(I - H*H) against prod rho_n^{2(n+1)} at each truncation order.

    Returns rows (M, det, product, relative gap).  When the truncation is
    not a strict contraction the determinant is still reported (it heads to
    zero); nothing raises.
    """
    grid = grid or default_grid()
    data = forward_scatter(seq, grid)
    rho = seq.rho()
    product = float(np.prod(rho ** (2.0 * (np.arange(len(rho)) + 1)))) if len(rho) else 1.0
    rows = []
    for m in sorted(m_list):
        h = hankel_from_symbol(data.s, m).mat
        system = np.eye(m) - h.conj().T @ h
        sign, logdet = np.linalg.slogdet(system)
        det = float(sign.real * np.exp(logdet)) if sign != 0 else 0.0
        gap = abs(det - product) / product if product > 0 else abs(det)
        rows.append((m, det, product, gap))
    return rows


@dataclass
class ClassReport:
    szego_sum: float
    gi_sum: float
    besov: float
    index: int
    a2_constant: float
    hankel_norm: float
    regular: bool
    hs_member: bool
    gi_member: bool
    szego_divergent: bool
    gi_divergent: bool
    besov_divergent: bool
    a2_stable: bool
    diagnostics: dict = field(default_factory=dict)

    def to_json(self, config=None):
        obj = {
            "szego_sum": self.szego_sum,
            "gi_sum": self.gi_sum,
            "besov": self.besov,
            "index": self.index,
            "a2_constant": self.a2_constant,
            "hankel_norm": self.hankel_norm,
            "regular": self.regular,
            "hs_member": self.hs_member,
            "gi_member": self.gi_member,
            "szego_divergent": self.szego_divergent,
            "gi_divergent": self.gi_divergent,
            "besov_divergent": self.besov_divergent,
            "a2_stable": self.a2_stable,
            "diagnostics": self.diagnostics,
        }
        if config:
            obj["config"] = dict(config)
        return obj


def classify(seq=None, s=None, grid=None, M=256, r=0.95, n_max_probe=16):
    """Populate the membership report from a sequence or from s alone.

    Inclusion flags are conjunctions by construction (gi implies hs implies
    regular); the independent realizations of the equivalent conditions are
    reported side by side under `diagnostics`, disagreements included.
    """
    from .inverse import glm_matrix, recover_verblunsky

    if seq is None and s is None:
        raise ValueError("provide a sequence or a scattering function")
    grid = grid or (s.grid if s is not None else default_grid())
    half_grid = CircleGrid(grid.size // 2)

    if seq is not None:
        data = forward_scatter(seq, grid)
        s = data.s
        rep = regularity_test(s=s, d0=data.d0, M=M)
        regular = rep.regular
        coeffs = np.asarray(seq.a)
        w_full = data.w
        w_half = spectral_density(seq, half_grid)
        a_minus1 = seq.a_minus1
    else:
        n_max = min(n_max_probe, M - 64)
        try:
            rec = recover_verblunsky(s, n_max, M, residual_tol=1e-4)
            regular = rec.regular
            coeffs = rec.a
            probe = VerblunskySeq(a_minus1=rec.a_minus1, a=tuple(rec.a))
            w_full = spectral_density(probe, grid)
            w_half = spectral_density(probe, half_grid)
            a_minus1 = rec.a_minus1
        except (RegularityError, NumericalError):
            regular = False
            coeffs = np.zeros(0)
            w_full = CircleFunction.constant(grid, 1.0)
            w_half = CircleFunction.constant(half_grid, 1.0)
            a_minus1 = -1.0

    sigma = hankel_from_symbol(s, M).sigma_max()
    index = winding_index(s, r=r)
    besov, besov_growth = _windowed_besov(s)
    szego_sum, szego_growth = _windowed_coeff_sum(coeffs, weight_by_index=False)
    gi_sum, gi_growth = _windowed_coeff_sum(coeffs, weight_by_index=True)

    a2_full = a2_constant(w_full)
    a2_half = a2_constant(w_half)
    a2_growth = (a2_full - a2_half) / a2_half if a2_half > 0 else 0.0
    a2_stable = a2_growth <= WINDOW_GROWTH_LIMIT

    winv_full = float(np.mean(1.0 / np.maximum(w_full.samples.real, 1e-300)))
    winv_half = float(np.mean(1.0 / np.maximum(w_half.samples.real, 1e-300)))
    winv_growth = (winv_full - winv_half) / winv_half if winv_half > 0 else 0.0

    hs_cond_a2 = a2_stable
    hs_cond_hankel = sigma < 1.0 - 1e-6 and winv_growth <= WINDOW_GROWTH_LIMIT
    hs_member = regular and sigma < 1.0 - 1e-6 and a2_stable

    gi_divergent = gi_growth > WINDOW_GROWTH_LIMIT
    besov_divergent = besov_growth > WINDOW_GROWTH_LIMIT
    gi_member = hs_member and not gi_divergent and not besov_divergent and index == 0

    glm_column_norm = None
    if hs_member and seq is not None:
        try:
            glm = glm_matrix(seq, 16, min(M, 128), grid=grid)
            glm_column_norm = float(np.max(np.linalg.norm(glm.mat, axis=0)))
        except (RegularityError, RuntimeError):
            glm_column_norm = None

    diagnostics = {
        "th47_a2_condition": bool(hs_cond_a2),
        "th47_hankel_condition": bool(hs_cond_hankel),
        "th47_disagreement": bool(hs_cond_a2 != hs_cond_hankel),
        "a2_growth": float(a2_growth),
        "w_inverse_mean": winv_full,
        "w_inverse_growth": float(winv_growth),
        "besov_growth": float(besov_growth),
        "gi_growth": float(gi_growth),
        "szego_growth": float(szego_growth),
        "glm_column_norm": glm_column_norm,
        "a_minus1": [complex(a_minus1).real, complex(a_minus1).imag],
    }
    return ClassReport(
        szego_sum=szego_sum, gi_sum=gi_sum, besov=besov, index=index,
        a2_constant=a2_full, hankel_norm=sigma, regular=regular,
        hs_member=hs_member, gi_member=gi_member,
        szego_divergent=szego_growth > WINDOW_GROWTH_LIMIT,
        gi_divergent=gi_divergent, besov_divergent=besov_divergent,
        a2_stable=a2_stable, diagnostics=diagnostics,
    )


def jacobi_verblunsky(gamma1, gamma2, support, a_minus1=-1.0):
    """Truncated coefficients of the Jacobi weight |t-1|^{2 g1} |t+1|^{2 g2}:
    a_n = -(g1 - (-1)^n g2)/(n + 1 + g1 + g2)."""
    n = np.arange(support)
    a = -(gamma1 - (-1.0) ** n * gamma2) / (n + 1.0 + gamma1 + gamma2)
    return VerblunskySeq(a_minus1=a_minus1, a=tuple(a))
