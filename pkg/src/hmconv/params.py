"""Control parameters and Fourier-mode bookkeeping.

The fluid layer is periodic with periods 2*pi*L1, 2*pi*L2 in the horizontal
directions and has unit depth.  A lattice mode carries an index (j, k, l)
with horizontal wavenumbers (j/L1, k/L2) and vertical wavenumber l*pi.
Indices split into three families:

    I1: l >= 1, j >= 0, (j, k) != (0, 0)   -- full convective modes
    I2: l == 0, j >= 0, (j, k) != (0, 0)   -- horizontal shear modes
    I3: j == k == 0, l >= 1                -- purely vertical modes
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator


class ParamError(ValueError):
    """A control parameter lies outside its admissible domain."""


class InvalidModeIndex(ValueError):
    """A lattice index fits none of the families I1, I2, I3."""


@dataclass(frozen=True)
class Params:
    """Dimensionless control parameters (Taylor, Chandrasekhar, Prandtl,
    horizontal period scales, and optionally the Rayleigh number)."""

    ta: float
    q: float
    pr: float
    l1: float
    l2: float
    ra: float | None = None

    @property
    def alpha1(self) -> float:
        return 1.0 / self.l1

    @property
    def alpha2(self) -> float:
        return 1.0 / self.l2

    def with_ra(self, ra: float) -> "Params":
        """Copy of these parameters with the Rayleigh number set."""
        if not math.isfinite(ra):
            raise ParamError("ra must be finite")
        return replace(self, ra=float(ra))

    def require_ra(self) -> float:
        if self.ra is None:
            raise ParamError("ra is required for this operation but is unset")
        return self.ra


def make_params(ta: float, q: float, pr: float, l1: float, l2: float,
                ra: float | None = None) -> Params:
    """Validate and construct a parameter set.

    Raises ParamError naming the offending field for out-of-domain values.
    """
    checks = [
        ("ta", ta, ta >= 0),
        ("q", q, q >= 0),
        ("pr", pr, pr > 0),
        ("l1", l1, l1 > 0),
        ("l2", l2, l2 > 0),
    ]
    for name, value, ok in checks:
        if not (math.isfinite(value) and ok):
            raise ParamError(f"parameter {name}={value!r} out of domain")
    if ra is not None and not math.isfinite(ra):
        raise ParamError(f"parameter ra={ra!r} out of domain")
    return Params(float(ta), float(q), float(pr), float(l1), float(l2),
                  None if ra is None else float(ra))


@dataclass(frozen=True, order=True)
class ModeIndex:
    j: int
    k: int
    l: int

    def reflected(self) -> "ModeIndex":
        """The k -> -k partner mode."""
        return ModeIndex(self.j, -self.k, self.l)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.j, self.k, self.l)


def index_class(idx: ModeIndex) -> str:
    """Classify a lattice index into 'I1', 'I2' or 'I3'.

    Raises InvalidModeIndex for indices fitting no family (negative l,
    negative j, or the zero index).
    """
    j, k, l = idx.j, idx.k, idx.l
    if l < 0 or j < 0:
        raise InvalidModeIndex(f"invalid lattice index {idx}")
    if j == 0 and k == 0:
        if l >= 1:
            return "I3"
        raise InvalidModeIndex("the zero index (0,0,0) is not a mode")
    return "I1" if l >= 1 else "I2"


@dataclass(frozen=True)
class ModeGeometry:
    """Derived wavenumbers of one mode: alpha_jk^2 = (j/L1)^2 + (k/L2)^2 and
    r^2 = alpha_jk^2 + l^2 pi^2."""

    alpha1: float
    alpha2: float
    alpha_jk_sq: float
    r_sq: float


def geometry(params: Params, idx: ModeIndex) -> ModeGeometry:
    index_class(idx)  # validity gate
    a1 = params.alpha1
    a2 = params.alpha2
    ajk = (idx.j * a1) ** 2 + (idx.k * a2) ** 2
    return ModeGeometry(a1, a2, ajk, ajk + idx.l ** 2 * math.pi ** 2)


def enumerate_indices(jmax: int, kmax: int, lmax: int,
                      classes: tuple[str, ...] = ("I1",)) -> Iterator[ModeIndex]:
    """Enumerate the half-lattice j >= 0 (k > 0 when j = 0), one index per
    conjugate mode pair, within the given bounds.

    lmax applies to I1/I3; I2 always has l = 0.
    """
    if "I1" in classes:
        for j in range(0, jmax + 1):
            for k in range(-kmax, kmax + 1):
                if j == 0 and k <= 0:
                    continue
                for l in range(1, lmax + 1):
                    yield ModeIndex(j, k, l)
    if "I2" in classes:
        for j in range(0, jmax + 1):
            for k in range(-kmax, kmax + 1):
                if j == 0 and k <= 0:
                    continue
                yield ModeIndex(j, k, 0)
    if "I3" in classes:
        for l in range(1, lmax + 1):
            yield ModeIndex(0, 0, l)
