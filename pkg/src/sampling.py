"""
Versuchspläne (Designs) mit festem Seed

- latin_hypercube: Latin-Hypercube-Design auf [0,1]^m
- scale_to_box: affine Abbildung auf einen Quader [lo, hi]
- gaussian_design: i.i.d. Standardnormal-Stichprobe
- prefix: erste k Zeilen eines Designs (ohne Neu-Stratifizierung)

Zufallszahlen kommen aus numpy.random.Generator mit PCG64. Der Algorithmus
ist dokumentiert und plattformunabhängig, CSV-Ausgaben sind damit reproduzierbar.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class SamplingError(ValueError):
    """Fehler bei der Erzeugung eines Designs"""
    pass


class Domain(Enum):
    """Definitionsbereich eines Designs"""
    UNIT_CUBE = "unit-cube"
    BOX = "box"
    STANDARD_GAUSSIAN = "standard-gaussian"


def make_rng(seed: int) -> np.random.Generator:
    """Generator mit festem Algorithmus (PCG64)"""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Design:
    """
    Versuchsplan {x_i}

    Attributes:
        points: M×m-Matrix
        domain: Definitionsbereich
        seed: Seed des Generators
        lo, hi: Quadergrenzen pro Koordinate (nur bei Domain.BOX)
    """
    points: np.ndarray
    domain: Domain
    seed: int
    lo: Optional[np.ndarray] = field(default=None)
    hi: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        """Validierung"""
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError("Design benötigt eine M×m-Matrix mit M, m ≥ 1")
        if self.domain == Domain.UNIT_CUBE:
            if np.any(points < 0.0) or np.any(points > 1.0):
                raise ValueError("Punkte außerhalb von [0,1]^m")
        elif self.domain == Domain.BOX:
            if self.lo is None or self.hi is None:
                raise ValueError("Quader-Design benötigt lo und hi")
            if np.any(points < self.lo) or np.any(points > self.hi):
                raise ValueError("Punkte außerhalb des Quaders")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def M(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]


def latin_hypercube(M: int, m: int, seed: int) -> Design:
    """
    Latin-Hypercube-Design auf [0,1]^m

    Pro Koordinate eine unabhängige Zufallspermutation der Schichten
    [i/M, (i+1)/M), innerhalb der Schicht gleichverteilt.

    Raises:
        SamplingError: bei M < 1 oder m < 1
    """
    if M < 1:
        raise SamplingError("Latin Hypercube benötigt M ≥ 1")
    if m < 1:
        raise SamplingError("Latin Hypercube benötigt m ≥ 1")

    rng = make_rng(seed)
    strata = np.column_stack([rng.permutation(M) for _ in range(m)])
    jitter = rng.random((M, m))
    points = (strata + jitter) / M

    # Rundung an der Schichtgrenze: Punkt in die Schichtmitte legen
    misplaced = np.floor(points * M) != strata
    points[misplaced] = (strata[misplaced] + 0.5) / M
    return Design(points=points, domain=Domain.UNIT_CUBE, seed=seed)


def scale_to_box(design: Design, lo, hi) -> Design:
    """
    Bildet ein [0,1]^m-Design affin auf [lo, hi] ab

    Args:
        design: Design auf dem Einheitswürfel
        lo, hi: Skalar oder Vektor der Länge m

    Raises:
        SamplingError: wenn lo ≥ hi in einer Koordinate
    """
    if design.domain != Domain.UNIT_CUBE:
        raise SamplingError("Nur Designs auf [0,1]^m können skaliert werden")
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (design.m,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (design.m,)).copy()
    if np.any(lo >= hi):
        raise SamplingError("Untere Grenze muss kleiner als obere Grenze sein")

    points = lo + design.points * (hi - lo)
    points = np.clip(points, lo, hi)
    return Design(points=points, domain=Domain.BOX, seed=design.seed, lo=lo, hi=hi)


def gaussian_design(M: int, m: int, seed: int) -> Design:
    """I.i.d. standardnormalverteilte Stichprobe (M×m)"""
    if M < 1 or m < 1:
        raise SamplingError("Gauß-Design benötigt M ≥ 1 und m ≥ 1")
    points = make_rng(seed).standard_normal((M, m))
    return Design(points=points, domain=Domain.STANDARD_GAUSSIAN, seed=seed)


def prefix(design: Design, k: int) -> Design:
    """
    Erste k Zeilen eines Designs

    Teilmengen eines Latin Hypercubes haben die Latin-Eigenschaft nicht mehr;
    es findet bewusst keine Neu-Stratifizierung statt.
    """
    if k < 1 or k > design.M:
        raise SamplingError(f"Präfixlänge muss zwischen 1 und {design.M} liegen")
    return Design(
        points=design.points[:k],
        domain=design.domain,
        seed=design.seed,
        lo=design.lo,
        hi=design.hi,
    )
