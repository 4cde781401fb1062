"""Jacobi spectra and Willmore index of catalog minimal surfaces in S^3.

For a minimal surface in S^3 the relevant operator is L = Delta + |II|^2 + 2
(the ambient Ricci contribution in the unit three-sphere is the constant 2),
and the Willmore index counts eigenvalues of L strictly between 0 and 2.
Both catalog surfaces have closed-form spectra: the great two-sphere through
the round Laplacian, and the Clifford torus through the lattice modes of its
flat induced metric (side length pi * sqrt(2), area 2 pi^2, |II|^2 = 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class EigenLine:
    lam: float
    multiplicity: int


@dataclass(frozen=True)
class S3MinimalSurface:
    kind: str  # "great_sphere" | "clifford_torus"
    second_fundamental_norm2: float
    ricci_normal: float = 2.0

    @property
    def area(self):
        if self.kind == "great_sphere":
            return 4.0 * math.pi
        return 2.0 * math.pi**2

    @property
    def willmore_energy_s3(self):
        """Integral of 1 + H^2; equals the area for minimal surfaces."""
        return self.area

    @property
    def total_curvature(self):
        """Gauss-Bonnet checksum: integral of K_g over the surface."""
        if self.kind == "great_sphere":
            return 4.0 * math.pi  # K = 1
        return 0.0  # flat


def great_sphere() -> S3MinimalSurface:
    return S3MinimalSurface(kind="great_sphere", second_fundamental_norm2=0.0)


def clifford_torus() -> S3MinimalSurface:
    return S3MinimalSurface(kind="clifford_torus", second_fundamental_norm2=2.0)


def laplacian_spectrum(surface: S3MinimalSurface, cutoff: int):
    """Eigenvalues of -Delta with multiplicities, up to the cutoff index."""
    if surface.kind == "great_sphere":
        return [(float(k * (k + 1)), 2 * k + 1) for k in range(cutoff + 1)]
    if surface.kind == "clifford_torus":
        # flat torus R^2 / (pi sqrt(2) Z)^2: modes exp(i sqrt(2) (k x + l y)),
        # -Delta eigenvalue 2 (k^2 + l^2)
        counts = {}
        for k in range(-cutoff, cutoff + 1):
            for l in range(-cutoff, cutoff + 1):
                s = k * k + l * l
                if s <= cutoff * cutoff:
                    counts[s] = counts.get(s, 0) + 1
        return [(2.0 * s, m) for s, m in sorted(counts.items())]
    raise ValueError(f"unknown surface kind {surface.kind!r}")


def jacobi_spectrum(surface: S3MinimalSurface, cutoff: int):
    """Eigenlines of L = Delta + |II|^2 + Ric(n, n), sorted descending."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    shift = surface.second_fundamental_norm2 + surface.ricci_normal
    lines = [
        EigenLine(lam=shift - mu, multiplicity=m)
        for mu, m in laplacian_spectrum(surface, cutoff)
    ]
    return sorted(lines, key=lambda e: -e.lam)


def willmore_index_s3(surface: S3MinimalSurface, cutoff: int = 8) -> int:
    """Number of Jacobi eigenvalues strictly inside (0, 2), with multiplicity.

    The cutoff only needs to reach the point where the spectrum has decreased
    below zero, which both closed-form catalogs guarantee for cutoff >= 2.
    """
    return index_from_lines(jacobi_spectrum(surface, cutoff))


def index_from_lines(lines) -> int:
    total = 0
    for line in lines:
        if 0.0 < line.lam < 2.0:
            total += line.multiplicity
    return total


def clifford_index_bruteforce(max_mode: int = 40) -> int:
    """Independent count of Clifford-torus lattice modes with Jacobi
    eigenvalue strictly inside (0, 2); enumeration oracle for the closed form."""
    count = 0
    for k in range(-max_mode, max_mode + 1):
        for l in range(-max_mode, max_mode + 1):
            lam = 4.0 - 2.0 * (k * k + l * l)
            if 0.0 < lam < 2.0:
                count += 1
    return count


def spectrum_report(surface: S3MinimalSurface, cutoff: int = 6) -> dict:
    lines = jacobi_spectrum(surface, cutoff)
    return {
        "surface": surface.kind,
        "spectrum": [{"lambda": line.lam, "multiplicity": line.multiplicity} for line in lines],
        "willmore_index": index_from_lines(lines),
        "area": surface.area,
        "willmore_energy_s3": surface.willmore_energy_s3,
        "total_curvature": surface.total_curvature,
    }
