"""
Lineare Algebra und Unterraum-Geometrie

Gemeinsame Kernel für alle anderen Module:
- Frame: m×n-Matrix mit orthonormalen Spalten (Punkt auf der Grassmann-Mannigfaltigkeit)
- Spectrum: absteigend sortierte Eigenzerlegung einer symmetrischen Matrix
- orthonormalize / complement / canonical_basis / sym_eig_desc / subspace_distance / lstsq

Vorzeichenkonvention:
In jeder Spalte ist der betragsgrößte Eintrag positiv. Bei (numerisch)
gleichen Beträgen entscheidet der kleinste Zeilenindex. Die Konvention macht
alle nachgelagerten Ergebnisse reproduzierbar.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

ORTHONORMAL_TOL = 1e-12
SYMMETRY_TOL = 1e-10
RANK_TOL = 1e-12
LSTSQ_COND = 1e-12

# relative Toleranz, ab der zwei Beträge als gleich gelten
_PIVOT_TIE_TOL = 1e-10


class LinalgError(ValueError):
    """Fehler in den Linear-Algebra-Kerneln"""
    pass


def _pivot_rows(A: np.ndarray) -> np.ndarray:
    """
    Zeilenindex des betragsgrößten Eintrags pro Spalte

    Bei Beträgen innerhalb von _PIVOT_TIE_TOL (relativ) gewinnt der kleinste Index.
    """
    absA = np.abs(A)
    amax = absA.max(axis=0)
    candidates = absA >= amax * (1.0 - _PIVOT_TIE_TOL)
    return np.argmax(candidates, axis=0)


def column_signs(A: np.ndarray) -> np.ndarray:
    """Gibt ±1 pro Spalte zurück, sodass A·diag(signs) die Vorzeichenkonvention erfüllt"""
    A = np.asarray(A, dtype=float)
    rows = _pivot_rows(A)
    pivots = A[rows, np.arange(A.shape[1])]
    return np.where(pivots < 0, -1.0, 1.0)


def fix_signs(A: np.ndarray) -> np.ndarray:
    """Wendet die Vorzeichenkonvention spaltenweise an (Kopie)"""
    A = np.array(A, dtype=float)
    return A * column_signs(A)


@dataclass(frozen=True)
class Frame:
    """
    Orthonormale Basis eines n-dimensionalen Unterraums des R^m

    Attributes:
        entries: m×n-Matrix mit orthonormalen Spalten

    Die Validierung prüft Orthonormalität (max|UᵀU − I| ≤ 1e-12) und die
    Vorzeichenkonvention. Für beliebige Matrizen siehe Frame.from_array().
    """
    entries: np.ndarray

    def __post_init__(self):
        """Validierung"""
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2:
            raise ValueError("Frame muss eine 2D-Matrix sein")
        m, n = entries.shape
        if n < 1 or n >= m:
            raise ValueError(f"Frame benötigt 1 ≤ n < m, erhalten: m={m}, n={n}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("Frame enthält nicht-endliche Einträge")
        deviation = np.max(np.abs(entries.T @ entries - np.eye(n)))
        if deviation > ORTHONORMAL_TOL:
            raise ValueError(f"Spalten nicht orthonormal (Abweichung {deviation:.3e})")
        if np.any(column_signs(entries) < 0):
            raise ValueError("Vorzeichenkonvention verletzt")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_array(cls, A) -> "Frame":
        """Erstellt Frame aus einer bereits orthonormalen Matrix (Vorzeichen werden fixiert)"""
        A = np.asarray(A, dtype=float)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        return cls(fix_signs(A))

    @property
    def m(self) -> int:
        """Umgebungsdimension"""
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        """Unterraumdimension"""
        return self.entries.shape[1]

    def to_list(self) -> list[list[float]]:
        """Zeilenweise Liste (für JSON)"""
        return self.entries.tolist()


@dataclass(frozen=True)
class Spectrum:
    """
    Eigenzerlegung einer symmetrischen Matrix

    Attributes:
        eigenvalues: Länge m, absteigend sortiert
        eigenvectors: m×m orthogonal, Spalte k gehört zu eigenvalues[k]
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        """Validierung"""
        lam = np.array(self.eigenvalues, dtype=float)
        W = np.array(self.eigenvectors, dtype=float)
        if lam.ndim != 1 or W.shape != (lam.size, lam.size):
            raise ValueError("Eigenwerte und Eigenvektoren haben inkompatible Dimensionen")
        if np.any(np.diff(lam) > 0):
            raise ValueError("Eigenwerte müssen absteigend sortiert sein")
        if np.any(column_signs(W) < 0):
            raise ValueError("Vorzeichenkonvention der Eigenvektoren verletzt")
        lam.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", W)

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    def leading(self, k: int) -> np.ndarray:
        """Erste k Eigenvektoren als m×k-Array"""
        return np.array(self.eigenvectors[:, :k])


def _as_array(W) -> np.ndarray:
    if isinstance(W, Frame):
        return np.asarray(W.entries)
    W = np.asarray(W, dtype=float)
    return W.reshape(-1, 1) if W.ndim == 1 else W


def polar_factor(A) -> np.ndarray:
    """
    Orthonormaler Polarfaktor P·Qᵀ aus der SVD A = P·Σ·Qᵀ

    Gleicher Spaltenraum wie A. Für A·Q mit orthogonalem Q gilt
    polar(A·Q) = polar(A)·Q; darauf beruht die Retraktion im Grassmann-Abstieg.
    """
    P, _, Qt = scipy.linalg.svd(np.asarray(A, dtype=float), full_matrices=False)
    return P @ Qt


def orthonormalize(A, method: str = "qr") -> Frame:
    """
    Orthonormalisiert die Spalten von A

    Args:
        A: m×n-Matrix mit vollem Spaltenrang
        method: "qr" (dünne QR-Zerlegung) oder "polar" (Polarfaktor)

    Returns:
        Frame mit span(Frame) = span(A)

    Raises:
        LinalgError: "rank deficient" bei Rangabfall
    """
    A = _as_array(A)
    s = scipy.linalg.svdvals(A)
    if s.size == 0 or s[-1] <= RANK_TOL * s[0]:
        raise LinalgError("rank deficient: Matrix hat keinen vollen Spaltenrang")
    if method == "qr":
        Q, _ = scipy.linalg.qr(A, mode="economic")
    elif method == "polar":
        Q = polar_factor(A)
    else:
        raise LinalgError(f"Unbekannte Methode: {method}")
    return Frame.from_array(Q)


def complement(U: Frame) -> Frame:
    """
    Orthonormale Basis des orthogonalen Komplements von span(U)

    Raises:
        LinalgError: "no complement" wenn n = m
    """
    A = _as_array(U)
    m, n = A.shape
    if n >= m:
        raise LinalgError("no complement: Unterraum füllt den ganzen Raum aus")
    Q, _ = scipy.linalg.qr(A, mode="full")
    V = Q[:, n:]
    # Projektion entfernt Rundungsreste aus span(U), danach neu orthonormieren
    V = V - A @ (A.T @ V)
    V, _ = scipy.linalg.qr(V, mode="economic")
    return Frame.from_array(V)


def canonical_basis(U) -> Frame:
    """
    Orthonormale Basis von span(U), die nur vom Projektor UUᵀ abhängt

    Gram-Schmidt über die Spalten von UUᵀ in fester Reihenfolge; Spalten mit
    Restnorm < 0.5/√m werden übersprungen. U und U·Q liefern dieselbe Basis
    bis auf Rundung. Die Schranke garantiert n ausgewählte Spalten, weil die
    Restnormen im Quadrat zur Spur des Restprojektors summieren.

    Raises:
        LinalgError: "rank deficient", wenn UUᵀ keinen Rang n hat
    """
    A = _as_array(U)
    m, n = A.shape
    P = A @ A.T
    tol = 0.5 / np.sqrt(m)
    Q = np.zeros((m, 0))
    for j in range(m):
        if Q.shape[1] == n:
            break
        v = P[:, j]
        for _ in range(2):
            v = v - Q @ (Q.T @ v)
        norm = float(np.linalg.norm(v))
        if norm >= tol:
            Q = np.column_stack([Q, v / norm])
    if Q.shape[1] < n:
        raise LinalgError("rank deficient: Projektor hat nicht den Rang n")
    return Frame.from_array(Q)


def sym_eig_desc(S) -> Spectrum:
    """
    Eigenzerlegung einer symmetrischen Matrix, absteigend sortiert

    Eigenvektoren numerisch gleicher Eigenwerte werden nach dem Zeilenindex
    ihres Pivot-Eintrags geordnet (innerhalb eines Eigenraums willkürlich,
    aber deterministisch).

    Raises:
        LinalgError: bei unsymmetrischer Eingabe
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise LinalgError("Matrix muss quadratisch sein")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T)) > SYMMETRY_TOL * scale:
        raise LinalgError("Matrix ist nicht symmetrisch")

    lam, W = scipy.linalg.eigh(0.5 * (S + S.T))
    lam = lam[::-1]
    W = fix_signs(W[:, ::-1])

    # Gruppen numerisch gleicher Eigenwerte
    tie_tol = 1e-12 * max(np.max(np.abs(lam)), np.finfo(float).tiny)
    groups = np.concatenate([[0], np.cumsum(np.abs(np.diff(lam)) > tie_tol)])
    # Eigenwerte bleiben sortiert, nur die Vektoren einer Gruppe werden umgestellt
    order = np.lexsort((_pivot_rows(W), groups))
    return Spectrum(eigenvalues=lam, eigenvectors=W[:, order])


def subspace_distance(Wa, Wb) -> float:
    """
    Abstand ‖Wa·Waᵀ − Wb·Wbᵀ‖₂ zweier gleichdimensionaler Unterräume

    Entspricht sin(größter Hauptwinkel) = √(1 − σ_min(WaᵀWb)²). Berechnet
    wird der gleichwertige Ausdruck ‖(I − Wa·Waᵀ)·Wb‖₂, der auch nahe 0
    keine Auslöschung zeigt.

    Raises:
        LinalgError: bei unterschiedlicher Unterraumdimension
    """
    A = _as_array(Wa)
    B = _as_array(Wb)
    if A.shape != B.shape:
        raise LinalgError(
            f"Unterraumdimensionen passen nicht: {A.shape} vs. {B.shape}"
        )
    residual = B - A @ (A.T @ B)
    sine = scipy.linalg.svdvals(residual)[0]
    return float(np.clip(sine, 0.0, 1.0))


def lstsq(A, b) -> np.ndarray:
    """
    Kleinste-Quadrate-Lösung min‖Aθ − b‖₂

    SVD-basiert mit relativer Abschneide-Toleranz 1e-12; bei Rangabfall
    wird die Lösung minimaler Norm zurückgegeben.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    theta, _, _, _ = scipy.linalg.lstsq(A, b, cond=LSTSQ_COND, lapack_driver="gelsd")
    return theta
