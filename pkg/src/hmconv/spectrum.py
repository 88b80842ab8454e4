"""Spectrum of the linearized operator for each lattice mode.

For an I1 mode the growth rate beta solves the cubic

    a3 b^3 + a2 b^2 + a1 b + a0 = 0,
    a3 = Pr r^4,
    a2 = (r^4 + 2 Pr (r^4 + Q k^2 a2^2)) r^2,
    a1 = (r^4 + Q k^2 a2^2)(Pr Q k^2 a2^2 + r^4 (Pr + 2))
         + Pr Ta l^2 pi^2 r^2 - Ra ajk^2 r^2,
    a0 = r^2 (r^4 + Q k^2 a2^2)^2 + r^4 l^2 pi^2 Ta - Ra ajk^2 (r^4 + Q k^2 a2^2),

with r^2 = ajk^2 + l^2 pi^2.  Eigenvector coefficients are normalized so the
vertical velocity coefficient is 1; the temperature coefficient is
1 / (r^2 + Pr beta).  Adjoint coefficients use the conjugated growth rate and
theta* = Pr Ra / (Pr beta* + r^2).

I2 modes (l = 0) carry the single real rate -(Q k^2 a2^2 + ajk^4) / ajk^2 with
eigenvector (k a2, -j a1, 0, 0).  I3 modes (j = k = 0) carry the rotation pair
-l^2 pi^2 +/- i sqrt(Ta) on the horizontal velocity and -l^2 pi^2 / Pr on the
temperature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .params import InvalidModeIndex, ModeIndex, Params, geometry, index_class

# A root is treated as real when |Im| <= REAL_TOL * (1 + |Re|).
REAL_TOL = 1e-9


class DegenerateCubicError(ValueError):
    """Leading cubic coefficient vanished."""


class SingularEigenvectorError(ValueError):
    """An eigenvector denominator vanished at the requested growth rate."""


@dataclass(frozen=True)
class CubicCoeffs:
    a3: float
    a2: float
    a1: float
    a0: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a3, self.a2, self.a1, self.a0)

    def __call__(self, beta: complex) -> complex:
        return ((self.a3 * beta + self.a2) * beta + self.a1) * beta + self.a0


@dataclass(frozen=True)
class EigvecCoeffs:
    u1: complex
    u2: complex
    u3: complex
    theta: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.u1, self.u2, self.u3, self.theta)


@dataclass(frozen=True)
class AdjointCoeffs:
    u1s: complex
    u2s: complex
    u3s: complex
    thetas: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.u1s, self.u2s, self.u3s, self.thetas)


@dataclass(frozen=True)
class ModeSpectrum:
    idx: ModeIndex
    family: str
    eigenvalues: tuple[complex, ...]
    vectors: tuple[EigvecCoeffs, ...]
    adjoints: tuple[AdjointCoeffs, ...]
    pairings: tuple[complex, ...]

    @property
    def leading(self) -> complex:
        return self.eigenvalues[0]


def is_real_root(beta: complex) -> bool:
    return abs(beta.imag) <= REAL_TOL * (1.0 + abs(beta.real))


def char_coeffs(params: Params, idx: ModeIndex) -> CubicCoeffs:
    """Cubic coefficients of the I1 characteristic equation at params.ra."""
    ra = params.require_ra()
    if index_class(idx) != "I1":
        raise InvalidModeIndex(f"characteristic cubic is defined for I1 only, got {idx}")
    geo = geometry(params, idx)
    r2 = geo.r_sq
    r4 = r2 * r2
    qk = params.q * (idx.k * geo.alpha2) ** 2
    lp2 = idx.l ** 2 * math.pi ** 2
    pr = params.pr
    a3 = pr * r4
    a2 = (r4 + 2.0 * pr * (r4 + qk)) * r2
    a1 = (r4 + qk) * (pr * qk + r4 * (pr + 2.0)) + pr * params.ta * lp2 * r2 \
        - ra * geo.alpha_jk_sq * r2
    a0 = r2 * (r4 + qk) ** 2 + r4 * lp2 * params.ta - ra * geo.alpha_jk_sq * (r4 + qk)
    return CubicCoeffs(a3, a2, a1, a0)


def _sort_roots(roots: list[complex]) -> list[complex]:
    # descending real part, ties broken by descending imaginary part
    return sorted(roots, key=lambda b: (-b.real, -b.imag))


def _newton_polish(c: CubicCoeffs, x: float) -> float:
    a3, a2, a1, _ = c.as_tuple()
    for _ in range(2):
        f = c(x).real
        df = (3.0 * a3 * x + 2.0 * a2) * x + a1
        if df == 0.0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    return x


def cubic_roots(c: CubicCoeffs) -> list[complex]:
    """All three roots of the characteristic cubic, sorted.

    Closed-form (trigonometric / Cardano) evaluation with one Newton polish
    per real root; complex roots are built as an exact conjugate pair from
    the deflated quadratic.
    """
    a3, a2, a1, a0 = c.as_tuple()
    if a3 == 0.0:
        raise DegenerateCubicError("a3 = 0: not a cubic")
    b, cc, d = a2 / a3, a1 / a3, a0 / a3
    # depressed cubic t^3 + p t + q with beta = t - b/3
    p = cc - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * cc / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc <= 0.0:
        # three real roots (trigonometric form)
        if p == 0.0:
            reals = [shift, shift, shift]
        else:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            arg = min(1.0, max(-1.0, arg))
            phi = math.acos(arg) / 3.0
            reals = [m * math.cos(phi - 2.0 * math.pi * n / 3.0) + shift
                     for n in range(3)]
        reals = [_newton_polish(c, x) for x in reals]
        return _sort_roots([complex(x, 0.0) for x in reals])
    # one real root + conjugate pair
    s = math.sqrt(disc)
    u = math.copysign(abs(-q / 2.0 + s) ** (1.0 / 3.0), -q / 2.0 + s)
    v = math.copysign(abs(-q / 2.0 - s) ** (1.0 / 3.0), -q / 2.0 - s)
    x0 = _newton_polish(c, u + v + shift)
    # deflate: a3 b^3 + ... = (b - x0)(a3 b^2 + bb b + cb)
    bb = a2 + a3 * x0
    cb = a1 + x0 * bb
    quad_disc = bb * bb - 4.0 * a3 * cb
    if quad_disc >= 0.0:
        r = math.sqrt(quad_disc)
        roots = [complex(x0), complex((-bb + r) / (2 * a3)), complex((-bb - r) / (2 * a3))]
    else:
        re = -bb / (2.0 * a3)
        im = math.sqrt(-quad_disc) / (2.0 * a3)
        roots = [complex(x0), complex(re, im), complex(re, -im)]
    return _sort_roots(roots)


def eigenvector(params: Params, idx: ModeIndex, beta: complex) -> EigvecCoeffs:
    """I1 eigenvector coefficients at growth rate beta (u3 normalized to 1)."""
    geo = geometry(params, idx)
    r2 = geo.r_sq
    a1, a2 = geo.alpha1, geo.alpha2
    j, k, l = idx.j, idx.k, idx.l
    w = (beta + r2) * r2 + params.q * (k * a2) ** 2
    if abs(w) == 0.0:
        raise SingularEigenvectorError(f"(beta + r^2) r^2 + Q k^2 a2^2 = 0 at {idx}")
    th_den = r2 + params.pr * beta
    if abs(th_den) == 0.0:
        raise SingularEigenvectorError(f"r^2 + Pr beta = 0 at {idx}")
    sq_ta = math.sqrt(params.ta)
    lp = l * math.pi
    u1 = -(lp / geo.alpha_jk_sq) * (j * a1 + sq_ta * k * a2 * r2 / w)
    u2 = -(lp / geo.alpha_jk_sq) * (k * a2 - sq_ta * j * a1 * r2 / w)
    return EigvecCoeffs(u1, u2, 1.0, 1.0 / th_den)


def adjoint_eigenvector(params: Params, idx: ModeIndex, beta_star: complex) -> AdjointCoeffs:
    """I1 adjoint eigenvector coefficients at the conjugated rate beta*."""
    ra = params.require_ra()
    geo = geometry(params, idx)
    r2 = geo.r_sq
    a1, a2 = geo.alpha1, geo.alpha2
    j, k, l = idx.j, idx.k, idx.l
    w = r2 * (r2 + beta_star) + params.q * (k * a2) ** 2
    if abs(w) == 0.0:
        raise SingularEigenvectorError(f"r^2 (r^2 + beta*) + Q k^2 a2^2 = 0 at {idx}")
    th_den = beta_star * params.pr + r2
    if abs(th_den) == 0.0:
        raise SingularEigenvectorError(f"Pr beta* + r^2 = 0 at {idx}")
    sq_ta = math.sqrt(params.ta)
    lp = l * math.pi
    u1s = -(lp / geo.alpha_jk_sq) * (-sq_ta * k * a2 * r2 / w + j * a1)
    u2s = -(lp / geo.alpha_jk_sq) * (sq_ta * j * a1 * r2 / w + k * a2)
    return AdjointCoeffs(u1s, u2s, 1.0, params.pr * ra / th_den)


def self_pairing(params: Params, idx: ModeIndex, vec: EigvecCoeffs,
                 adj: AdjointCoeffs) -> complex:
    """Bilinear cell inner product <Psi, Psi*> from the coefficient tuples.

    Cell measure factors: the quarter cell area pi^2/(a1 a2) multiplies the
    coefficient sum for l >= 1 modes; l = 0 modes carry a half-cell factor.
    """
    fam = index_class(idx)
    a1a2 = params.alpha1 * params.alpha2
    s = (vec.u1 * adj.u1s + vec.u2 * adj.u2s + vec.u3 * adj.u3s
         + vec.theta * adj.thetas)
    if fam == "I2":
        return 2.0 * math.pi ** 2 / a1a2 * s
    return math.pi ** 2 / a1a2 * s


def mode_spectrum(params: Params, idx: ModeIndex) -> ModeSpectrum:
    """Eigenvalues, eigenvectors, adjoints and self-pairings for one mode."""
    fam = index_class(idx)
    if fam == "I1":
        roots = cubic_roots(char_coeffs(params, idx))
        vecs = []
        adjs = []
        pairs = []
        for b in roots:
            if is_real_root(b):
                b = complex(b.real, 0.0)
            v = eigenvector(params, idx, b)
            a = adjoint_eigenvector(params, idx, b.conjugate())
            vecs.append(v)
            adjs.append(a)
            pairs.append(self_pairing(params, idx, v, a))
        return ModeSpectrum(idx, fam, tuple(roots), tuple(vecs), tuple(adjs),
                            tuple(pairs))
    if fam == "I2":
        geo = geometry(params, idx)
        beta = -(params.q * (idx.k * geo.alpha2) ** 2 + geo.alpha_jk_sq ** 2) \
            / geo.alpha_jk_sq
        v = EigvecCoeffs(idx.k * geo.alpha2, -idx.j * geo.alpha1, 0.0, 0.0)
        a = AdjointCoeffs(idx.k * geo.alpha2, -idx.j * geo.alpha1, 0.0, 0.0)
        return ModeSpectrum(idx, fam, (complex(beta),), (v,), (a,),
                            (self_pairing(params, idx, v, a),))
    # I3: rotation pair on (u1, u2), then the temperature branch
    l2p2 = idx.l ** 2 * math.pi ** 2
    sq_ta = math.sqrt(params.ta)
    pair = [complex(-l2p2, sq_ta), complex(-l2p2, -sq_ta)]
    theta_rate = complex(-l2p2 / params.pr)
    entries = [
        (pair[0], EigvecCoeffs(1.0, 1.0j, 0.0, 0.0), AdjointCoeffs(1.0, 1.0j, 0.0, 0.0)),
        (pair[1], EigvecCoeffs(1.0, -1.0j, 0.0, 0.0), AdjointCoeffs(1.0, -1.0j, 0.0, 0.0)),
        (theta_rate, EigvecCoeffs(0.0, 0.0, 0.0, 1.0), AdjointCoeffs(0.0, 0.0, 0.0, 1.0)),
    ]
    entries.sort(key=lambda e: (-e[0].real, -e[0].imag))
    evs, vecs, adjs = zip(*entries)
    a1a2 = params.alpha1 * params.alpha2
    pairs = []
    for v, a in zip(vecs, adjs):
        s = v.u1 * a.u1s + v.u2 * a.u2s + v.theta * a.thetas
        pairs.append(2.0 * math.pi ** 2 / a1a2 * s)
    return ModeSpectrum(idx, fam, tuple(evs), tuple(vecs), tuple(adjs),
                        tuple(pairs))


def _b_coeffs(params: Params, idx: ModeIndex, vec: EigvecCoeffs
              ) -> tuple[complex, complex, complex]:
    """Induced-field profile coefficients from the closed per-mode solve of
    (D^2 - ajk^2) b = -+ k a2 u."""
    geo = geometry(params, idx)
    k_a2 = idx.k * geo.alpha2
    if idx.k == 0:
        return (0.0, 0.0, 0.0)
    r2 = geo.r_sq if idx.l > 0 else geo.alpha_jk_sq
    return (k_a2 * vec.u1 / r2, k_a2 * vec.u2 / r2, -k_a2 * vec.u3 / r2)


def linear_residual(params: Params, idx: ModeIndex, beta: complex,
                    vec: EigvecCoeffs, adjoint: bool = False) -> float:
    """Max-norm residual of the per-mode vertical system at (beta, vec).

    The induced field is eliminated by its closed-form solve and the pressure
    by projection onto the divergence-free direction of the mode, so the
    residual vector collects the three momentum rows (pressure-projected),
    the temperature row, the three induced-field rows and the divergence row.
    With adjoint=True the conjugate-operator system is evaluated instead
    (rotation sign flipped, buoyancy/temperature forcing swapped to
    theta*/Pr and Ra u3*).
    """
    ra = params.require_ra()
    fam = index_class(idx)
    geo = geometry(params, idx)
    j, k, l = idx.j, idx.k, idx.l
    a1, a2 = geo.alpha1, geo.alpha2
    lp = l * math.pi
    sq_ta = math.sqrt(params.ta)
    u1, u2, u3, th = vec.as_tuple()
    b1, b2, b3 = _b_coeffs(params, idx, vec)
    if fam == "I3":
        lam = -lp * lp
        rot = -sq_ta if adjoint else sq_ta
        rows = [
            (lam - beta) * u1 + rot * u2,
            (lam - beta) * u2 - rot * u1,
        ]
        if adjoint:
            rows.append((lam / params.pr - beta) * th + ra * u3)
        else:
            rows.append((lam / params.pr - beta) * th + u3 / params.pr)
        return float(max(abs(r) for r in rows))
    r2 = geo.r_sq if l > 0 else geo.alpha_jk_sq
    lam = -r2  # (D^2 - ajk^2) on the mode profiles
    rot = -sq_ta if adjoint else sq_ta
    if adjoint:
        # magnetic closure folded in: -Q d2 Lap^-1 d2 u* = -Q k^2 a2^2 u* / r^2
        mg = -params.q * (k * a2) ** 2 / r2
        m1 = (lam - beta) * u1 + rot * u2 + mg * u1
        m2 = (lam - beta) * u2 - rot * u1 + mg * u2
        m3 = (lam - beta) * u3 + th / params.pr + mg * u3
        row_t = (lam / params.pr - beta) * th + ra * u3
    else:
        m1 = (lam - beta) * u1 + rot * u2 - params.q * k * a2 * b1
        m2 = (lam - beta) * u2 - rot * u1 - params.q * k * a2 * b2
        m3 = (lam - beta) * u3 + ra * th + params.q * k * a2 * b3
        row_t = (lam / params.pr - beta) * th + u3
    # pressure elimination: residual (m1, m2, m3) + p (j a1, k a2, l pi) = 0
    w = np.array([j * a1, k * a2, lp], dtype=complex)
    m = np.array([m1, m2, m3], dtype=complex)
    p = -(m @ w) / (w @ w)
    m = m + p * w
    rows = list(m) + [row_t]
    if not adjoint:
        rows += [lam * b1 + k * a2 * u1, lam * b2 + k * a2 * u2,
                 lam * b3 - k * a2 * u3]
    rows.append(j * a1 * u1 + k * a2 * u2 + lp * u3)
    return float(max(abs(r) for r in rows))
