"""
Aktive Unterräume: Schätzung von C = E[∇f ∇fᵀ] aus Gradienten-Stichproben

Funktionsweise (Heuristik für den Startwert der Ridge-Approximation):
1. Ĉ = (1/M) Σ g_i g_iᵀ aus M Gradienten (Monte Carlo)
2. Eigenzerlegung Ĉ = W Λ Wᵀ, absteigend
3. Dimension n an der größten Spektrallücke wählen
4. Variabilität per Bootstrap (Ziehen mit Zurücklegen) abschätzen

Design-Entscheidung:
- Gradienten kommen als Daten (CSV oder Callback), es gibt keine
  Finite-Differenzen-Rückfalllösung in diesem Modul.
- Referenz für Konvergenztests: analytisches C = A² + bbᵀ der quadratischen
  Funktion ½xᵀAx + bᵀx unter Standardnormalverteilung.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.linalg import Frame, Spectrum, sym_eig_desc, subspace_distance

logger = logging.getLogger(__name__)

DEFAULT_BOOTSTRAP = 100
MIN_GAP_RATIO = 1.1


class SubspaceError(ValueError):
    """Fehler bei der Schätzung aktiver Unterräume"""
    pass


class NoSpectralGapError(SubspaceError):
    """Keine ausreichende Spektrallücke: f ist kein guter Kandidat für eine Ridge-Approximation"""
    pass


@dataclass(frozen=True)
class GradientSet:
    """
    Gradienten-Stichproben ∇f(x_i)

    Attributes:
        rows: M×m-Matrix, eine Zeile pro Stichprobe
    """
    rows: np.ndarray

    def __post_init__(self):
        """Validierung"""
        rows = np.array(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("GradientSet benötigt mindestens eine Zeile")
        if not np.all(np.isfinite(rows)):
            raise SubspaceError("Gradienten enthalten nicht-endliche Einträge")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def M(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class SpectrumEstimate:
    """
    Schätzung Ĉ samt Eigenzerlegung

    Attributes:
        spectrum: absteigende Eigenwerte Λ und Eigenvektoren W
        sample_count: Anzahl Gradienten (0 für analytische Referenzen)
        C_hat: symmetrische m×m-Matrix
    """
    spectrum: Spectrum
    sample_count: int
    C_hat: np.ndarray

    def __post_init__(self):
        """Validierung"""
        C = np.array(self.C_hat, dtype=float)
        if C.shape != (self.spectrum.m, self.spectrum.m):
            raise ValueError("C_hat passt nicht zur Dimension des Spektrums")
        if np.max(np.abs(C - C.T)) > 0.0:
            raise ValueError("C_hat muss symmetrisch sein")
        lam = self.spectrum.eigenvalues
        if lam[-1] < -1e-10 * max(1.0, lam[0]):
            raise ValueError("C_hat ist nicht positiv semidefinit")
        C.setflags(write=False)
        object.__setattr__(self, "C_hat", C)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @property
    def m(self) -> int:
        return self.spectrum.m

    def to_dict(self) -> dict:
        """Konvertiert die Schätzung zu Dictionary (Eigenvektoren spaltenweise)"""
        return {
            "m": self.m,
            "sample_count": self.sample_count,
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.T.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumEstimate":
        """Erstellt SpectrumEstimate aus Dictionary (Eigenvektoren spaltenweise)"""
        lam = np.asarray(data["eigenvalues"], dtype=float)
        W = np.asarray(data["eigenvectors"], dtype=float).T
        C = (W * lam) @ W.T
        C = 0.5 * (C + C.T)
        return cls(
            spectrum=Spectrum(eigenvalues=lam, eigenvectors=W),
            sample_count=int(data.get("sample_count", 0)),
            C_hat=C,
        )


@dataclass(frozen=True)
class BootstrapSummary:
    """
    Bootstrap-Zusammenfassung

    Attributes:
        eigen_ranges: m×3 (min, mean, max) pro Eigenwert-Index
        subspace_ranges: (m−1)×3 (min, mean, max) des Unterraumabstands für k = 1…m−1
        B: Anzahl Replikate
        seed: Seed der Replikate
    """
    eigen_ranges: np.ndarray
    subspace_ranges: np.ndarray
    B: int
    seed: int

    def __post_init__(self):
        """Validierung"""
        if self.B < 1:
            raise ValueError("B muss mindestens 1 sein")
        for name in ("eigen_ranges", "subspace_ranges"):
            ranges = np.array(getattr(self, name), dtype=float).reshape(-1, 3)
            if np.any(ranges[:, 0] > ranges[:, 1]) or np.any(ranges[:, 1] > ranges[:, 2]):
                raise ValueError(f"{name}: min ≤ mean ≤ max verletzt")
            object.__setattr__(self, name, ranges)
        if np.any(self.subspace_ranges < 0.0) or np.any(self.subspace_ranges > 1.0):
            raise ValueError("Unterraumabstände müssen in [0,1] liegen")

    def to_dict(self) -> dict:
        """Konvertiert Zusammenfassung zu Dictionary"""
        return {
            "B": self.B,
            "seed": self.seed,
            "eigen_ranges": np.asarray(self.eigen_ranges).tolist(),
            "subspace_ranges": np.asarray(self.subspace_ranges).tolist(),
        }


def _covariance(rows: np.ndarray) -> np.ndarray:
    C = rows.T @ rows / rows.shape[0]
    return 0.5 * (C + C.T)


def estimate_C(G: GradientSet) -> SpectrumEstimate:
    """
    Monte-Carlo-Schätzung Ĉ = (1/M) Σ g_i g_iᵀ mit Eigenzerlegung

    Args:
        G: Gradienten-Stichproben

    Returns:
        SpectrumEstimate mit symmetrisiertem Ĉ
    """
    C = _covariance(G.rows)
    return SpectrumEstimate(spectrum=sym_eig_desc(C), sample_count=G.M, C_hat=C)


def analytic_quadratic_C(A, b) -> SpectrumEstimate:
    """
    Analytisches C = A² + bbᵀ für f(x) = ½xᵀAx + bᵀx, x ~ N(0, I)

    Args:
        A: symmetrische m×m-Matrix
        b: Vektor der Länge m
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    C = A @ A + np.outer(b, b)
    C = 0.5 * (C + C.T)
    return SpectrumEstimate(spectrum=sym_eig_desc(C), sample_count=0, C_hat=C)


def choose_n(spectrum: Spectrum, max_n: int | None = None) -> int:
    """
    Wählt n an der größten Lücke log(λ_k / λ_{k+1}), k ≤ max_n

    Eigenwerte ≤ ε = 1e-14·λ₁ werden als ε behandelt.

    Raises:
        NoSpectralGapError: "no spectral gap", wenn kein Verhältnis > 1.1
    """
    lam = np.asarray(spectrum.eigenvalues, dtype=float)
    m = lam.size
    if max_n is None:
        max_n = m - 1
    max_n = min(max_n, m - 1)
    if max_n < 1:
        raise SubspaceError("max_n muss mindestens 1 sein")
    if lam[0] <= 0.0:
        raise NoSpectralGapError("no spectral gap: alle Eigenwerte sind null")

    eps = 1e-14 * lam[0]
    floored = np.maximum(lam[: max_n + 1], eps)
    log_ratios = np.log(floored[:-1] / floored[1:])
    if np.max(log_ratios) <= np.log(MIN_GAP_RATIO):
        raise NoSpectralGapError(
            "no spectral gap: alle aufeinanderfolgenden Verhältnisse ≤ 1.1, "
            "f ist kein guter Kandidat für eine Ridge-Approximation"
        )
    return int(np.argmax(log_ratios)) + 1


def active_frame(estimate: SpectrumEstimate, n: int) -> Frame:
    """Frame W₁ aus den ersten n Eigenvektoren"""
    return Frame.from_array(estimate.spectrum.leading(n))


def inactive_frame(estimate: SpectrumEstimate, n: int) -> Frame:
    """Frame W₂ aus den letzten m−n Eigenvektoren"""
    return Frame.from_array(np.array(estimate.eigenvectors[:, n:]))


def _leading_distances(W_ref: np.ndarray, W: np.ndarray) -> np.ndarray:
    m = W_ref.shape[0]
    return np.array([
        subspace_distance(W_ref[:, :k], W[:, :k]) for k in range(1, m)
    ])


def bootstrap_spectrum(
    G: GradientSet,
    B: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    workers: int = 1,
) -> BootstrapSummary:
    """
    Bootstrap-Variabilität von Eigenwerten und führenden Unterräumen

    Jedes Replikat zieht M Zeilen mit Zurücklegen (eigener, abgeleiteter
    Seed pro Replikat), berechnet das Spektrum neu und misst pro k den
    Abstand zum führenden k-dimensionalen Eigenraum der Punktschätzung.

    Args:
        G: Gradienten-Stichproben
        B: Anzahl Replikate (≥ 1)
        seed: Seed für die Replikat-Seeds
        workers: Threads für die Replikate (Ergebnis unabhängig davon)
    """
    if B < 1:
        raise SubspaceError("Bootstrap benötigt B ≥ 1")

    reference = estimate_C(G)
    W_ref = np.asarray(reference.eigenvectors)
    children = np.random.SeedSequence(seed).spawn(B)

    def replicate(child: np.random.SeedSequence) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.Generator(np.random.PCG64(child))
        idx = rng.integers(0, G.M, size=G.M)
        spec = sym_eig_desc(_covariance(G.rows[idx]))
        return spec.eigenvalues, _leading_distances(W_ref, np.asarray(spec.eigenvectors))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(replicate, children))
    else:
        results = [replicate(child) for child in children]

    eigs = np.array([r[0] for r in results])
    dists = np.array([r[1] for r in results]).reshape(B, G.m - 1)
    logger.debug("Bootstrap mit %d Replikaten abgeschlossen", B)

    def ranges(values: np.ndarray) -> np.ndarray:
        mean = np.clip(values.mean(axis=0), values.min(axis=0), values.max(axis=0))
        return np.column_stack([values.min(axis=0), mean, values.max(axis=0)])

    return BootstrapSummary(
        eigen_ranges=ranges(eigs),
        subspace_ranges=ranges(dists),
        B=B,
        seed=seed,
    )


def error_metrics(reference: SpectrumEstimate, estimate: SpectrumEstimate) -> tuple[float, float]:
    """
    Fehlermaße (errΛ, errW) einer Schätzung gegenüber einer Referenz

    errΛ = (1/m) Σ_k |λ_ref,k − λ_est,k| / |λ_ref,k|
    errW = (1/(m−1)) Σ_{k<m} ‖W_ref,k W_ref,kᵀ − W_est,k W_est,kᵀ‖₂

    Raises:
        SubspaceError: bei unterschiedlichem m oder Referenz-Eigenwert 0
    """
    if reference.m != estimate.m:
        raise SubspaceError("Referenz und Schätzung haben unterschiedliche Dimension")
    lam_ref = reference.eigenvalues
    if np.any(lam_ref == 0.0):
        raise SubspaceError("Referenz-Eigenwert 0: relativer Fehler undefiniert")

    err_lambda = float(np.mean(np.abs(lam_ref - estimate.eigenvalues) / np.abs(lam_ref)))
    distances = _leading_distances(np.asarray(reference.eigenvectors),
                                   np.asarray(estimate.eigenvectors))
    err_w = float(np.mean(distances)) if distances.size else 0.0
    return err_lambda, err_w
