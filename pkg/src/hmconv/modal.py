"""Exact trigonometric field algebra on one periodicity cell.

Every eigenfield is a finite combination of terms

    trig(j a1 x1 + k a2 x2) * trig(n pi x3)

with u1, u2 carrying cos(n pi x3) profiles and u3, theta carrying
sin(n pi x3) profiles.  A TrigField stores the complex exponential
coefficients of the horizontal factor (index offsets jcap, kcap) and the
harmonic index n of the vertical factor, so cell inner products are exact
finite sums and the advection bilinear form is evaluated exactly through
sufficiently fine pseudo-spectral grids (the fields are trigonometric
polynomials, so the grids integrate them without error).

The advection product (u_F . grad) G keeps each component in its parity
class: cos-profile components stay cos, sin-profile stay sin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ModeIndex, Params, geometry, index_class
from .spectrum import (AdjointCoeffs, EigvecCoeffs, ModeSpectrum, is_real_root,
                       mode_spectrum)

COS, SIN = 0, 1
PARITY = (COS, COS, SIN, SIN)  # u1, u2, u3, theta


class TrigField:
    """Four-component field on the cell [0,2piL1] x [0,2piL2] x [0,1]."""

    __slots__ = ("alpha1", "alpha2", "jcap", "kcap", "ncap", "data")

    def __init__(self, alpha1: float, alpha2: float, jcap: int, kcap: int,
                 ncap: int, data: np.ndarray | None = None):
        self.alpha1 = alpha1
        self.alpha2 = alpha2
        self.jcap = jcap
        self.kcap = kcap
        self.ncap = ncap
        if data is None:
            data = np.zeros((4, 2 * jcap + 1, 2 * kcap + 1, ncap + 1),
                            dtype=complex)
        self.data = data

    def copy(self) -> "TrigField":
        return TrigField(self.alpha1, self.alpha2, self.jcap, self.kcap,
                         self.ncap, self.data.copy())

    def _slot(self, j: int, k: int) -> tuple[int, int]:
        return (self.jcap + j, self.kcap + k)

    def add_term(self, comp: int, j: int, k: int, n: int, hkind: str,
                 coeff: complex) -> None:
        """Add coeff * trig(j a1 x1 + k a2 x2) * V_n(x3) to one component.

        hkind selects sin or cos for the horizontal factor; the vertical
        factor is the component's parity class (sin_0 terms vanish and are
        dropped).
        """
        if coeff == 0:
            return
        if PARITY[comp] == SIN and n == 0:
            return
        sj, sk = self._slot(j, k)
        cj, ck = self._slot(-j, -k)
        if hkind == "cos":
            self.data[comp, sj, sk, n] += 0.5 * coeff
            self.data[comp, cj, ck, n] += 0.5 * coeff
        elif hkind == "sin":
            half = coeff / 2j
            self.data[comp, sj, sk, n] += half
            self.data[comp, cj, ck, n] -= half
        else:
            raise ValueError(f"hkind must be 'sin' or 'cos', got {hkind!r}")

    def scaled(self, s: complex) -> "TrigField":
        return TrigField(self.alpha1, self.alpha2, self.jcap, self.kcap,
                         self.ncap, self.data * s)

    def add_scaled(self, other: "TrigField", s: complex = 1.0) -> None:
        """In-place self += s * other (other caps must fit in self)."""
        dj = self.jcap - other.jcap
        dk = self.kcap - other.kcap
        if dj < 0 or dk < 0 or self.ncap < other.ncap:
            raise ValueError("target caps too small")
        nj = 2 * other.jcap + 1
        nk = 2 * other.kcap + 1
        self.data[:, dj:dj + nj, dk:dk + nk, :other.ncap + 1] += s * other.data

    def norm(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0


def zero_field(params: Params, jcap: int, kcap: int, ncap: int) -> TrigField:
    return TrigField(params.alpha1, params.alpha2, jcap, kcap, ncap)


def mode_field(params: Params, idx: ModeIndex,
               coeffs: tuple[complex, complex, complex, complex],
               jcap: int | None = None, kcap: int | None = None,
               ncap: int | None = None) -> TrigField:
    """Field of one lattice mode from its coefficient tuple.

    For complex coefficient tuples the result is the complex field; pass the
    componentwise real or imaginary parts to build the two real fields of a
    conjugate pair.
    """
    fam = index_class(idx)
    j, k, l = idx.j, idx.k, idx.l
    f = zero_field(params,
                   abs(j) if jcap is None else jcap,
                   abs(k) if kcap is None else kcap,
                   l if ncap is None else ncap)
    c1, c2, c3, c4 = coeffs
    if fam in ("I1", "I2"):
        f.add_term(0, j, k, l, "sin", c1)
        f.add_term(1, j, k, l, "sin", c2)
        f.add_term(2, j, k, l, "cos", c3)
        f.add_term(3, j, k, l, "cos", c4)
    else:  # I3: horizontal factor is constant
        f.add_term(0, 0, 0, l, "cos", c1)
        f.add_term(1, 0, 0, l, "cos", c2)
        f.add_term(2, 0, 0, l, "cos", c3)
        f.add_term(3, 0, 0, l, "cos", c4)
    return f


def inner(a: TrigField, b: TrigField) -> complex:
    """Bilinear cell inner product int_cell a . b (no conjugation).

    Exact: exponential orthogonality in the horizontal directions and
    int_0^1 V_n V_m = delta_nm / 2 (n >= 1), 1 (n = m = 0, cos only).
    """
    area = 4.0 * math.pi ** 2 / (a.alpha1 * a.alpha2)
    jc = min(a.jcap, b.jcap)
    kc = min(a.kcap, b.kcap)
    nc = min(a.ncap, b.ncap)
    total = 0.0 + 0.0j
    wa = a.data[:, a.jcap - jc:a.jcap + jc + 1, a.kcap - kc:a.kcap + kc + 1, :nc + 1]
    wb = b.data[:, b.jcap - jc:b.jcap + jc + 1, b.kcap - kc:b.kcap + kc + 1, :nc + 1]
    flip = wb[:, ::-1, ::-1, :]
    w = np.full(nc + 1, 0.5)
    w[0] = 1.0
    for comp in range(4):
        weights = w.copy()
        if PARITY[comp] == SIN:
            weights[0] = 0.0
        total += np.sum(wa[comp] * flip[comp] * weights)
    return complex(total * area)


def _vertical_kernel(ncap: int, m: int, parity: int, deriv: bool) -> np.ndarray:
    x3 = (np.arange(m) + 0.5) / m
    n = np.arange(ncap + 1)[:, None]
    grid = n * math.pi * x3[None, :]
    if parity == COS:
        return -n * math.pi * np.sin(grid) if deriv else np.cos(grid)
    return n * math.pi * np.cos(grid) if deriv else np.sin(grid)


def _component_grid(f: TrigField, comp: int, n1: int, n2: int, m: int,
                    deriv: str | None = None) -> np.ndarray:
    """Values of one component (or its derivative) on the exact product grid."""
    data = f.data[comp]
    if deriv == "1":
        j = np.arange(-f.jcap, f.jcap + 1)[:, None, None]
        data = data * (1j * j * f.alpha1)
    elif deriv == "2":
        k = np.arange(-f.kcap, f.kcap + 1)[None, :, None]
        data = data * (1j * k * f.alpha2)
    kern = _vertical_kernel(f.ncap, m, PARITY[comp], deriv == "3")
    tmp = np.einsum("jkn,nm->jkm", data, kern)
    h = np.zeros((n1, n2, m), dtype=complex)
    js = np.arange(-f.jcap, f.jcap + 1) % n1
    ks = np.arange(-f.kcap, f.kcap + 1) % n2
    np.add.at(h, (js[:, None], ks[None, :]), tmp)
    return np.fft.ifft2(h, axes=(0, 1)) * (n1 * n2)


def _component_from_grid(vals: np.ndarray, parity: int, alpha1: float,
                         alpha2: float, jcap: int, kcap: int, ncap: int
                         ) -> np.ndarray:
    n1, n2, m = vals.shape
    h = np.fft.fft2(vals, axes=(0, 1)) / (n1 * n2)
    js = np.arange(-jcap, jcap + 1) % n1
    ks = np.arange(-kcap, kcap + 1) % n2
    sel = h[js[:, None], ks[None, :], :]
    kern = _vertical_kernel(ncap, m, parity, deriv=False)
    quad = kern * (2.0 / m)
    if parity == COS:
        quad[0] = 1.0 / m
    return np.einsum("jkm,nm->jkn", sel, quad)


def advect(f: TrigField, g: TrigField) -> TrigField:
    """(u_f . grad) g, all four components, exactly.

    Result caps are the sums of the operand caps; the intermediate grid is
    sized so the trigonometric products are integrated without aliasing.
    """
    jcap = f.jcap + g.jcap
    kcap = f.kcap + g.kcap
    ncap = f.ncap + g.ncap
    n1 = 2 * jcap + 1
    n2 = 2 * kcap + 1
    m = ncap + 1
    u = [_component_grid(f, c, n1, n2, m) for c in range(3)]
    out = TrigField(f.alpha1, f.alpha2, jcap, kcap, ncap)
    for comp in range(4):
        ng = (u[0] * _component_grid(g, comp, n1, n2, m, deriv="1")
              + u[1] * _component_grid(g, comp, n1, n2, m, deriv="2")
              + u[2] * _component_grid(g, comp, n1, n2, m, deriv="3"))
        out.data[comp] = _component_from_grid(ng, PARITY[comp], f.alpha1,
                                              f.alpha2, jcap, kcap, ncap)
    return out


def bilinear_g(f: TrigField, g: TrigField) -> TrigField:
    """Quadratic interaction -( (u_f . grad) u_g, (u_f . grad) theta_g ).

    The velocity part is left unprojected; pairings against divergence-free
    adjoint fields are unaffected because gradient fields integrate to zero
    against them.
    """
    return advect(f, g).scaled(-1.0)


@dataclass
class Block1D:
    """A real eigen-branch: rate, field, adjoint field, pairing denominator."""
    idx: ModeIndex
    branch: int
    beta: float
    field: TrigField
    adj: TrigField
    pairing: float


@dataclass
class Block2D:
    """A conjugate eigen-pair in real coordinates.

    L f1 = sigma f1 - rho f2, L f2 = rho f1 + sigma f2.  The adjusted adjoint
    fields at1, at2 diagonalize the pairing; both denominators equal denom.
    """
    idx: ModeIndex
    branch: int  # index of the first member in the sorted spectrum
    sigma: float
    rho: float
    f1: TrigField
    f2: TrigField
    at1: TrigField
    at2: TrigField
    denom: float


Block = Block1D | Block2D


def _real_tuple(t) -> tuple:
    return tuple(complex(c).real for c in t)


def _imag_tuple(t) -> tuple:
    return tuple(complex(c).imag for c in t)


def mode_blocks(params: Params, idx: ModeIndex,
                spec: ModeSpectrum | None = None) -> list[Block]:
    """Real block structure of one mode's spectrum.

    Real branches become Block1D; conjugate pairs become Block2D with the
    pair member of positive imaginary part first.
    """
    if spec is None:
        spec = mode_spectrum(params, idx)
    blocks: list[Block] = []
    used = [False] * len(spec.eigenvalues)
    for s, beta in enumerate(spec.eigenvalues):
        if used[s]:
            continue
        if is_real_root(beta):
            fld = mode_field(params, idx, _real_tuple(spec.vectors[s].as_tuple()))
            adj = mode_field(params, idx, _real_tuple(spec.adjoints[s].as_tuple()))
            pairing = inner(fld, adj)
            blocks.append(Block1D(idx, s, beta.real, fld, adj, float(pairing.real)))
            used[s] = True
            continue
        # locate the conjugate partner
        t = next(t for t in range(s + 1, len(spec.eigenvalues))
                 if not used[t] and abs(spec.eigenvalues[t] - beta.conjugate())
                 <= 1e-9 * (1.0 + abs(beta)))
        lead = s if beta.imag > 0 else t
        other = t if lead == s else s
        vec = spec.vectors[lead].as_tuple()
        adjc = spec.adjoints[lead].as_tuple()
        f1 = mode_field(params, idx, _real_tuple(vec))
        f2 = mode_field(params, idx, _imag_tuple(vec))
        a1 = mode_field(params, idx, _real_tuple(adjc))
        a2 = mode_field(params, idx, _imag_tuple(adjc))
        n11 = inner(f1, a1)
        alpha_t = (inner(f1, a2) / n11).real
        at1 = a1.copy()
        at1.add_scaled(a2, alpha_t)
        at2 = a2.copy()
        at2.add_scaled(a1, -alpha_t)
        d1 = inner(f1, at1).real
        blocks.append(Block2D(idx, min(s, t), spec.eigenvalues[lead].real,
                              abs(spec.eigenvalues[lead].imag), f1, f2, at1,
                              at2, float(d1)))
        used[s] = used[t] = True
    return blocks


def project_on_block(forcing: TrigField, block: Block) -> tuple[float, ...]:
    """Normalized projection(s) of a real forcing field onto a block.

    Block1D: ( <F, adj>/pairing, ).  Block2D: the pair of adjusted-adjoint
    projections.
    """
    if isinstance(block, Block1D):
        return (inner(forcing, block.adj).real / block.pairing,)
    return (inner(forcing, block.at1).real / block.denom,
            inner(forcing, block.at2).real / block.denom)


def solve_slaved(block: Block, g: tuple[float, ...]) -> tuple[float, ...]:
    """Steady slaved amplitude(s) from L x = -g_projected on the block.

    Block1D: x = -g / beta.  Block2D: solve the 2x2 rotation block
    [[sigma, rho], [-rho, sigma]] x = -g.
    """
    if isinstance(block, Block1D):
        return (-g[0] / block.beta,)
    s, r = block.sigma, block.rho
    m2 = s * s + r * r
    return ((r * g[1] - s * g[0]) / m2, -(r * g[0] + s * g[1]) / m2)


def block_state_field(block: Block, x: tuple[float, ...],
                      caps: tuple[int, int, int] | None = None) -> TrigField:
    """x . basis fields of the block as one TrigField."""
    if isinstance(block, Block1D):
        return block.field.scaled(x[0])
    out = block.f1.scaled(x[0])
    out.add_scaled(block.f2, x[1])
    return out
