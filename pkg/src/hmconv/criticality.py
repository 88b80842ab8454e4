"""Critical Rayleigh numbers, critical index set and exchange of stabilities.

The cubic for an I1 mode has a zero root exactly when Ra = f(J),

    f(J) = [r^2 (r^4 + Q k^2 a2^2)^2 + Ta r^4 l^2 pi^2]
           / [ajk^2 (r^4 + Q k^2 a2^2)],

and a pure imaginary conjugate pair exactly when Ra = g(J) (and the pair is
genuine only when a1 > 0 there),

    g(J) = 2 (Q k^2 a2^2 + r^4) / (ajk^2 r^2)
           * [(1 + Pr) r^4 + Pr Q k^2 a2^2
              + Pr^2 Ta r^2 l^2 pi^2 / ((1 + Pr) r^4 + Pr Q k^2 a2^2)].

The onset value is Ra_c = min(min f, min g) and the critical index set X
collects the minimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import ModeIndex, Params, enumerate_indices, geometry, index_class
from .spectrum import char_coeffs, cubic_roots, is_real_root, mode_spectrum

HARD_CAP = (64, 64, 8)
TIE_REL_TOL = 1e-6
SHELL_FACTOR = 1.5


class SearchFailure(RuntimeError):
    """Search box expansion hit the hard cap without isolating the minimum."""


class NoHopfCandidate(ValueError):
    """g(J) does not yield a genuine pure imaginary pair for this index."""


@dataclass
class CriticalReport:
    ra_c1: float
    ra_c2: float
    ra_c: float
    X: list[ModeIndex]
    kind: str  # SimpleReal | ComplexPair | DoubleReal
    multiplicity: int
    hopf_rho: float | None
    pes_ok: bool | None
    search_bounds_used: tuple[int, int, int]
    non_generic: bool = False
    notes: list[str] = field(default_factory=list)


def f_of(params: Params, idx: ModeIndex) -> float:
    """Rayleigh number at which this I1 mode acquires a zero growth rate."""
    geo = geometry(params, idx)
    r2 = geo.r_sq
    r4 = r2 * r2
    qk = params.q * (idx.k * geo.alpha2) ** 2
    lp2 = idx.l ** 2 * math.pi ** 2
    return (r2 * (r4 + qk) ** 2 + params.ta * r4 * lp2) / (geo.alpha_jk_sq * (r4 + qk))


def g_of(params: Params, idx: ModeIndex) -> float | None:
    """Rayleigh number at which this I1 mode acquires a pure imaginary pair,
    or None when the pair is not genuine (a1 <= 0 there)."""
    geo = geometry(params, idx)
    r2 = geo.r_sq
    r4 = r2 * r2
    qk = params.q * (idx.k * geo.alpha2) ** 2
    lp2 = idx.l ** 2 * math.pi ** 2
    pr = params.pr
    inner = (1.0 + pr) * r4 + pr * qk
    val = 2.0 * (qk + r4) / (geo.alpha_jk_sq * r2) * (inner + pr ** 2 * params.ta * r2 * lp2 / inner)
    coeffs = char_coeffs(params.with_ra(val), idx)
    if coeffs.a1 <= 0.0:
        return None
    return val


def hopf_frequency(params: Params, idx: ModeIndex) -> float:
    """Angular frequency rho of the pure imaginary pair at Ra = g(J)."""
    val = g_of(params, idx)
    if val is None:
        raise NoHopfCandidate(f"no pure imaginary pair for {idx}")
    coeffs = char_coeffs(params.with_ra(val), idx)
    return math.sqrt(coeffs.a1 / coeffs.a3)


def _scan_box(params: Params, bounds: tuple[int, int, int]):
    """Evaluate f and g over the half-lattice box; returns per-index values."""
    f_vals: dict[ModeIndex, float] = {}
    g_vals: dict[ModeIndex, float] = {}
    for idx in enumerate_indices(*bounds):
        f_vals[idx] = f_of(params, idx)
        g = g_of(params, idx)
        if g is not None:
            g_vals[idx] = g
    return f_vals, g_vals


def _on_shell(idx: ModeIndex, bounds: tuple[int, int, int]) -> bool:
    return idx.j == bounds[0] or abs(idx.k) == bounds[1] or idx.l == bounds[2]


def critical_search(params: Params, bounds: tuple[int, int, int] | None = None,
                    run_pes: bool = True) -> CriticalReport:
    """Locate Ra_c1 = min f, Ra_c2 = min g, the critical set X and its kind.

    The search box grows until the minimum of f and g over the boundary
    shell exceeds the incumbent minimum by SHELL_FACTOR, so the reported
    minimum cannot hide outside the box; a hard cap guards the expansion.
    """
    box = tuple(bounds) if bounds is not None else (8, 8, 3)
    while True:
        f_vals, g_vals = _scan_box(params, box)
        ra_c1 = min(f_vals.values())
        ra_c2 = min(g_vals.values()) if g_vals else math.inf
        incumbent = min(ra_c1, ra_c2)
        shell = [v for i, v in f_vals.items() if _on_shell(i, box)]
        shell += [v for i, v in g_vals.items() if _on_shell(i, box)]
        if shell and min(shell) > SHELL_FACTOR * incumbent:
            break
        if box >= HARD_CAP:
            raise SearchFailure(f"no isolated minimum within hard cap {HARD_CAP}")
        box = (min(box[0] + 4, HARD_CAP[0]), min(box[1] + 4, HARD_CAP[1]),
               min(box[2] + 1, HARD_CAP[2]))

    ra_c = min(ra_c1, ra_c2)
    tol = TIE_REL_TOL * abs(ra_c)
    f_min = [i for i, v in f_vals.items() if v - ra_c <= tol]
    g_min = [i for i, v in g_vals.items() if v - ra_c <= tol]

    notes: list[str] = []
    non_generic = False
    if f_min and g_min:
        non_generic = True
        notes.append("steady and oscillatory onsets tie within tolerance")
    if g_min:
        kind = "ComplexPair"
        winners = sorted(g_min)
    else:
        kind = "DoubleReal" if any(i.k != 0 for i in f_min) else "SimpleReal"
        winners = sorted(f_min)
    # expose both members of each conjugate pair
    X: list[ModeIndex] = []
    for i in winners:
        X.append(i)
        if i.k != 0 and i.reflected() not in X:
            X.append(i.reflected())
    X.sort()
    base = {(i.j, abs(i.k), i.l) for i in winners}
    if len(base) > 1:
        non_generic = True
        notes.append("multiple distinct critical indices (regime-boundary tie)")
    if kind == "ComplexPair" and any(i.j * i.k != 0 for i in winners):
        notes.append("oscillatory critical index has j*k != 0")

    hopf_rho = None
    if kind == "ComplexPair":
        hopf_rho = hopf_frequency(params, winners[0])

    report = CriticalReport(
        ra_c1=ra_c1, ra_c2=ra_c2, ra_c=ra_c, X=X, kind=kind,
        multiplicity=len(X), hopf_rho=hopf_rho, pes_ok=None,
        search_bounds_used=box, non_generic=non_generic, notes=notes)
    if run_pes:
        ok, diag = pes_check(params.with_ra(ra_c), report)
        report.pes_ok = ok
        if not ok:
            report.notes.append(f"PES failed: {diag}")
    return report


def _sigma_prime_closed(params: Params, idx: ModeIndex) -> float:
    """d(Re beta)/d(Ra) of the critical pair at Ra_c2 from implicit
    differentiation of the cubic: (a1 a0' - a0 a1') / (2 a2^2 rho^2 + 2 a1^2)."""
    geo = geometry(params, idx)
    r2 = geo.r_sq
    r4 = r2 * r2
    qk = params.q * (idx.k * geo.alpha2) ** 2
    c = char_coeffs(params, idx)
    rho2 = c.a1 / c.a3
    a0p = -geo.alpha_jk_sq * (r4 + qk)
    a1p = -geo.alpha_jk_sq * r2
    return (c.a1 * a0p - c.a0 * a1p) / (2.0 * c.a2 ** 2 * rho2 + 2.0 * c.a1 ** 2)


def sigma_prime_fd(params: Params, idx: ModeIndex, step: float) -> float:
    """Centered finite difference of the leading real part across Ra."""
    ra = params.require_ra()
    hi = cubic_roots(char_coeffs(params.with_ra(ra + step), idx))[0].real
    lo = cubic_roots(char_coeffs(params.with_ra(ra - step), idx))[0].real
    return (hi - lo) / (2.0 * step)


def pes_check(params: Params, report: CriticalReport,
              stability_margin: float = -1e-8) -> tuple[bool, dict]:
    """Verify exchange of stabilities at params.ra (normally Ra_c).

    Real criticality: the zero root crosses upward (d a0/d Ra < 0) and every
    non-critical mode in the search box keeps Re beta below the margin.
    Complex criticality: sigma'(Ra_c2) > 0 by the closed form, cross-checked
    against a centered finite difference of the leading real part.
    """
    ra = params.require_ra()
    diag: dict = {"offending": None}
    crit = {(i.j, i.k, i.l) for i in report.X}
    jmax, kmax, lmax = report.search_bounds_used

    if report.kind in ("SimpleReal", "DoubleReal"):
        for i in report.X:
            geo = geometry(params, i)
            qk = params.q * (i.k * geo.alpha2) ** 2
            a0p = -geo.alpha_jk_sq * (geo.r_sq ** 2 + qk)
            if not a0p < 0.0:
                diag["offending"] = (i, "a0'(Ra) >= 0")
                return False, diag
    else:
        i = report.X[0]
        sp = _sigma_prime_closed(params, i)
        fd = sigma_prime_fd(params, i, 1e-4 * ra)
        diag["sigma_prime"] = sp
        diag["sigma_prime_fd"] = fd
        if not sp > 0.0:
            diag["offending"] = (i, "sigma'(Ra_c2) <= 0")
            return False, diag
        if abs(sp - fd) > 1e-3 * abs(sp):
            diag["offending"] = (i, "closed-form / finite-difference mismatch")
            return False, diag

    skip_rank = 2 if report.kind == "ComplexPair" else 1
    for idx in enumerate_indices(jmax, kmax, lmax, classes=("I1", "I2", "I3")):
        spec = mode_spectrum(params, idx)
        start = skip_rank if (idx.j, abs(idx.k), idx.l) in {(j, abs(k), l) for j, k, l in crit} else 0
        for b in spec.eigenvalues[start:]:
            if not b.real < stability_margin:
                diag["offending"] = (idx, f"Re beta = {b.real:.3e} at Ra_c")
                return False, diag
    return True, diag


@dataclass
class SweepRow:
    axis1: float
    axis2: float
    ra_c1: float | None
    ra_c2: float | None
    relation: str
    idx: ModeIndex | None
    multiplicity: int | None
    kind: str


def sweep(plane: str, axis1_values, axis2_values, fixed: Params,
          bounds: tuple[int, int, int] | None = None) -> list[SweepRow]:
    """Regime scan over a (Ta, Pr) or (L1, L2) grid, row-major.

    Per-point failures are recorded in-row (kind='error') and the sweep
    continues.
    """
    if plane not in ("TaPr", "L1L2"):
        raise ValueError(f"unknown sweep plane {plane!r}")
    rows = []
    for v1 in axis1_values:
        for v2 in axis2_values:
            if plane == "TaPr":
                p = Params(float(v1), fixed.q, float(v2), fixed.l1, fixed.l2)
            else:
                p = Params(fixed.ta, fixed.q, fixed.pr, float(v1), float(v2))
            try:
                rep = critical_search(p, bounds=bounds, run_pes=False)
                if rep.ra_c2 == math.inf or rep.ra_c1 < rep.ra_c2:
                    relation = "Ra_c1<Ra_c2"
                elif rep.ra_c2 < rep.ra_c1:
                    relation = "Ra_c2<Ra_c1"
                else:
                    relation = "tie"
                lead = rep.X[0]
                rows.append(SweepRow(float(v1), float(v2), rep.ra_c1,
                                     None if rep.ra_c2 == math.inf else rep.ra_c2,
                                     relation, lead, rep.multiplicity, rep.kind))
            except Exception as exc:  # record and continue
                rows.append(SweepRow(float(v1), float(v2), None, None,
                                     f"error:{type(exc).__name__}", None, None,
                                     "error"))
    return rows
