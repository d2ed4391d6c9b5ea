"""
Polynomiale Ridge-Approximation f(x) ≈ p_N(Uᵀx, θ)

Alternierende Minimierung:
1. y_i = Uᵀx_i berechnen
2. θ als exakte Kleinste-Quadrate-Lösung bei festem U
3. U per Grassmann-Gradientenabstieg (höchstens max_steps Schritte) bei festem θ
4. U₀ ← U*, wiederholen (P Iterationen), abschließend θ neu anpassen

Design-Entscheidungen:
- Monombasis auf skalierten Koordinaten y/s (s = max|y| pro Koordinate),
  damit die Designmatrix bis N = 5 gut konditioniert bleibt
- Retraktion über den Polarfaktor: gleicher Spann wie QR, aber
  äquivariant unter U₀ → U₀·Q, sodass das Residuum nur vom Unterraum abhängt
- Armijo-Backtracking: erster Versuchsschritt mit Frobenius-Länge 1,
  Halbierung, Abnahmekonstante 1e-4, höchstens 30 Halbierungen
- Innerhalb einer Anpassung bleibt U ein rohes Array; die Vorzeichenkonvention
  wird erst am Ende angewendet (mit exakt transformiertem θ)
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import comb

from src.linalg import Frame, column_signs, lstsq, orthonormalize, polar_factor
from src.sampling import make_rng

logger = logging.getLogger(__name__)

MODEL_VERSION = "ridgekit-model-v1"
DEFAULT_ITERATIONS = 20
DEFAULT_MAX_STEPS = 10

SCALE_FLOOR = 1e-12
ARMIJO_START_STEP = 1.0
ARMIJO_SHRINK = 0.5
ARMIJO_DECREASE = 1e-4
ARMIJO_MAX_BACKTRACKS = 30
GRAD_TOL = 1e-10


class PolyRidgeError(ValueError):
    """Fehler bei der Ridge-Anpassung"""
    pass


@dataclass(frozen=True)
class MultiIndexBasis:
    """
    Total-Grad-Multiindexmenge {α ∈ N^n : |α| ≤ N}, graduiert lexikographisch

    Attributes:
        n: Anzahl Variablen
        N: Totalgrad
        indices: K×n-Integer-Array, K = binom(N+n, n)
    """
    n: int
    N: int
    indices: np.ndarray

    def __post_init__(self):
        """Validierung"""
        indices = np.array(self.indices, dtype=int).reshape(-1, self.n)
        if indices.shape[0] != int(comb(self.N + self.n, self.n, exact=True)):
            raise ValueError("Anzahl Multiindizes passt nicht zu binom(N+n, n)")
        degrees = indices.sum(axis=1)
        if np.any(np.diff(degrees) < 0):
            raise ValueError("Multiindizes müssen nach Grad sortiert sein")
        if len({tuple(row) for row in indices}) != indices.shape[0]:
            raise ValueError("Multiindizes enthalten Duplikate")
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def count(self) -> int:
        return self.indices.shape[0]


def _compositions(n: int, degree: int):
    """Alle n-Tupel mit Summe degree, erste Komponente absteigend"""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in _compositions(n - 1, degree - first):
            yield (first,) + rest


def multi_indices(n: int, N: int) -> MultiIndexBasis:
    """
    Total-Grad-Basis mit n Variablen und Grad N

    Beispiel n = 2, N = 2: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2)
    """
    if n < 1 or N < 0:
        raise PolyRidgeError("multi_indices benötigt n ≥ 1 und N ≥ 0")
    rows = [alpha for degree in range(N + 1) for alpha in _compositions(n, degree)]
    return MultiIndexBasis(n=n, N=N, indices=np.array(rows, dtype=int))


def _powers(Z: np.ndarray, N: int) -> np.ndarray:
    """Z^k für k = 0…N, Form M×n×(N+1)"""
    return Z[:, :, None] ** np.arange(N + 1)


def design_matrix(Y, basis: MultiIndexBasis, y_scale) -> np.ndarray:
    """
    Monom-Designmatrix: Spalte k = ∏_j (y_j / s_j)^{α_kj}

    Spaltenreihenfolge wie in basis, Spalte 0 ist konstant 1.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    powers = _powers(Y / np.asarray(y_scale, dtype=float), basis.N)
    D = np.ones((Y.shape[0], basis.count))
    for j in range(basis.n):
        D *= powers[:, j, basis.indices[:, j]]
    return D


def _design_gradient(Y: np.ndarray, basis: MultiIndexBasis, y_scale: np.ndarray) -> np.ndarray:
    """Ableitungen der Designmatrix nach y_j, Form n×M×K"""
    powers = _powers(Y / y_scale, basis.N)
    k = np.arange(basis.N + 1)
    dpowers = np.zeros_like(powers)
    dpowers[:, :, 1:] = k[1:] * powers[:, :, :-1] / y_scale[None, :, None]

    grads = np.empty((basis.n, Y.shape[0], basis.count))
    for j in range(basis.n):
        D = np.ones((Y.shape[0], basis.count))
        for i in range(basis.n):
            table = dpowers if i == j else powers
            D *= table[:, i, basis.indices[:, i]]
        grads[j] = D
    return grads


@dataclass(frozen=True)
class PolyModel:
    """
    Polynom p_N(y, θ) in n Ridge-Koordinaten

    Attributes:
        basis: Multiindexbasis
        theta: Koeffizienten (Länge = basis.count)
        y_scale: positive Skalierung pro Ridge-Koordinate
    """
    basis: MultiIndexBasis
    theta: np.ndarray
    y_scale: np.ndarray

    def __post_init__(self):
        """Validierung"""
        theta = np.array(self.theta, dtype=float).reshape(-1)
        y_scale = np.array(self.y_scale, dtype=float).reshape(-1)
        if theta.size != self.basis.count:
            raise ValueError("Länge von theta passt nicht zur Basis")
        if y_scale.size != self.basis.n or np.any(y_scale <= 0.0):
            raise ValueError("y_scale muss positiv sein und Länge n haben")
        theta.setflags(write=False)
        y_scale.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "y_scale", y_scale)

    def evaluate(self, Y) -> np.ndarray:
        """p(y_i) für alle Zeilen von Y"""
        return design_matrix(Y, self.basis, self.y_scale) @ self.theta

    def gradient(self, Y) -> np.ndarray:
        """∇_y p(y_i) als M×n-Matrix"""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return (_design_gradient(Y, self.basis, self.y_scale) @ self.theta).T

    def with_signs(self, signs) -> "PolyModel":
        """Polynom für gespiegelte Koordinaten y_j → d_j·y_j (d_j = ±1)"""
        flips = np.where(np.asarray(signs) < 0, self.basis.indices % 2, 0).sum(axis=1)
        theta = self.theta * np.where(flips % 2 == 1, -1.0, 1.0)
        return PolyModel(basis=self.basis, theta=theta, y_scale=self.y_scale)

    def to_dict(self) -> dict:
        return {
            "N": self.basis.N,
            "multi_indices": self.basis.indices.tolist(),
            "theta": self.theta.tolist(),
            "y_scale": self.y_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolyModel":
        indices = np.asarray(data["multi_indices"], dtype=int)
        n = indices.shape[1]
        basis = MultiIndexBasis(n=n, N=int(data["N"]), indices=indices)
        return cls(basis=basis, theta=data["theta"], y_scale=data["y_scale"])


@dataclass(frozen=True)
class LabeledSamples:
    """
    Ein-/Ausgabepaare (x_i, f(x_i))

    Attributes:
        X: M×m-Eingaben
        f: Ausgaben (Länge M)
    """
    X: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        """Validierung"""
        X = np.array(self.X, dtype=float)
        f = np.array(self.f, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("X muss eine M×m-Matrix mit M ≥ 1 sein")
        if f.size != X.shape[0]:
            raise ValueError("Anzahl Ausgaben passt nicht zur Anzahl Eingaben")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(f))):
            raise ValueError("Stichproben enthalten nicht-endliche Werte")
        X.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "f", f)

    @property
    def M(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def head(self, k: int) -> "LabeledSamples":
        """Erste k Paare (Reihenfolge bleibt erhalten)"""
        return LabeledSamples(X=self.X[:k], f=self.f[:k])


@dataclass(frozen=True)
class HistoryRow:
    """Residuum nach einem Halbschritt der alternierenden Minimierung"""
    iteration: int
    phase: str
    residual: float


@dataclass(frozen=True)
class RidgeModel:
    """
    Angepasste Ridge-Funktion p(Uᵀx)

    Attributes:
        U: Frame m×n
        poly: Polynom in den Ridge-Koordinaten
        history: Residuen pro Halbschritt (Phase "theta" oder "grassmann")
        init: Bezeichnung des Startwerts (active, identity, random, ...)
        seed: Seed des Startwerts (falls zufällig)
    """
    U: Frame
    poly: PolyModel
    history: tuple[HistoryRow, ...] = field(default_factory=tuple)
    init: str = ""
    seed: Optional[int] = None

    def __post_init__(self):
        """Validierung"""
        if self.U.n != self.poly.basis.n:
            raise ValueError("Dimension von U passt nicht zum Polynom")

    @property
    def m(self) -> int:
        return self.U.m

    @property
    def n(self) -> int:
        return self.U.n

    @property
    def residual_final(self) -> Optional[float]:
        return self.history[-1].residual if self.history else None

    def to_dict(self) -> dict:
        """Konvertiert Modell zu Dictionary (Format ridgekit-model-v1)"""
        poly = self.poly.to_dict()
        return {
            "version": MODEL_VERSION,
            "m": self.m,
            "n": self.n,
            "N": poly["N"],
            "U": self.U.to_list(),
            "multi_indices": poly["multi_indices"],
            "theta": poly["theta"],
            "y_scale": poly["y_scale"],
            "init": self.init,
            "seed": self.seed,
            "residual_final": self.residual_final,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RidgeModel":
        """Erstellt Modell aus Dictionary"""
        if data.get("version") != MODEL_VERSION:
            raise PolyRidgeError(f"Unbekannte Modellversion: {data.get('version')}")
        U = np.asarray(data["U"], dtype=float)
        U, poly = _canonicalize(U, PolyModel.from_dict(data))
        history: tuple[HistoryRow, ...] = ()
        if data.get("residual_final") is not None:
            history = (HistoryRow(0, "theta", float(data["residual_final"])),)
        return cls(U=U, poly=poly, history=history,
                   init=data.get("init", ""), seed=data.get("seed"))

    def save_to_file(self, filepath: str):
        """Speichert Modell als JSON-Datei"""
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load_from_file(cls, filepath: str) -> "RidgeModel":
        """Lädt Modell aus JSON-Datei"""
        with open(filepath, "r", encoding="utf-8") as f:
            data = json.load(f)
        return cls.from_dict(data)


def _canonicalize(U: np.ndarray, poly: PolyModel) -> tuple[Frame, PolyModel]:
    """Vorzeichenkonvention auf U anwenden und θ exakt mittransformieren"""
    signs = column_signs(U)
    return Frame(U * signs), poly.with_signs(signs)


def identity_frame(m: int, n: int) -> Frame:
    """Erste n Spalten der m×m-Einheitsmatrix"""
    return Frame(np.eye(m)[:, :n])


def random_frame(m: int, n: int, seed: int) -> Frame:
    """Orthonormalisierte standardnormale m×n-Matrix"""
    return orthonormalize(make_rng(seed).standard_normal((m, n)), method="qr")


def _frame_array(U) -> np.ndarray:
    return np.asarray(U.entries if isinstance(U, Frame) else U, dtype=float)


def _fit(X: np.ndarray, f: np.ndarray, U: np.ndarray, basis: MultiIndexBasis) -> PolyModel:
    Y = X @ U
    y_scale = np.maximum(np.max(np.abs(Y), axis=0), SCALE_FLOOR)
    theta = lstsq(design_matrix(Y, basis, y_scale), f)
    return PolyModel(basis=basis, theta=theta, y_scale=y_scale)


def _objective(X: np.ndarray, f: np.ndarray, U: np.ndarray, poly: PolyModel) -> float:
    r = f - poly.evaluate(X @ U)
    return float(r @ r)


def _euclidean_grad(X: np.ndarray, f: np.ndarray, U: np.ndarray, poly: PolyModel) -> np.ndarray:
    Y = X @ U
    r = f - poly.evaluate(Y)
    return -2.0 * X.T @ (r[:, None] * poly.gradient(Y))


def fit_theta(samples: LabeledSamples, U: Frame, basis: MultiIndexBasis) -> PolyModel:
    """
    Kleinste-Quadrate-Koeffizienten θ bei festem U

    Skalierung s_j = max_i |y_ij| (mindestens 1e-12). Bei Rangabfall der
    Designmatrix wird das θ minimaler Norm gewählt.
    """
    return _fit(samples.X, samples.f, _frame_array(U), basis)


def residual(samples: LabeledSamples, model: RidgeModel) -> float:
    """Σ_i (f_i − p_N(Uᵀx_i, θ))²"""
    return _objective(samples.X, samples.f, _frame_array(model.U), model.poly)


def euclidean_grad_U(samples: LabeledSamples, model: RidgeModel) -> np.ndarray:
    """∂J/∂U = −2 Σ_i r_i x_i ∇_y p(y_i)ᵀ bei festem θ (m×n)"""
    return _euclidean_grad(samples.X, samples.f, _frame_array(model.U), model.poly)


def grassmann_gradient(samples: LabeledSamples, model: RidgeModel) -> np.ndarray:
    """Projizierter Gradient (I − UUᵀ)·∂J/∂U"""
    U = _frame_array(model.U)
    G = euclidean_grad_U(samples, model)
    return G - U @ (U.T @ G)


def _descend(
    X: np.ndarray,
    f: np.ndarray,
    U: np.ndarray,
    poly: PolyModel,
    max_steps: int,
) -> tuple[np.ndarray, float, int]:
    """
    Steepest Descent auf der Grassmann-Mannigfaltigkeit bei festem θ

    Returns:
        (U, J, Anzahl akzeptierter Schritte); U als rohes Array
    """
    J = _objective(X, f, U, poly)
    accepted = 0
    for _ in range(max_steps):
        G = _euclidean_grad(X, f, U, poly)
        G = G - U @ (U.T @ G)
        gnorm = float(np.linalg.norm(G))
        if gnorm <= GRAD_TOL * (1.0 + J):
            break

        t = ARMIJO_START_STEP
        for _ in range(ARMIJO_MAX_BACKTRACKS + 1):
            U_trial = polar_factor(U - t * G)
            J_trial = _objective(X, f, U_trial, poly)
            if J_trial <= J - ARMIJO_DECREASE * t * gnorm ** 2:
                break
            t *= ARMIJO_SHRINK
        else:
            logger.debug("Liniensuche ohne ausreichende Abnahme, Abstieg stagniert")
            break

        U, J = U_trial, J_trial
        accepted += 1
    return U, J, accepted


def grassmann_descent(
    samples: LabeledSamples,
    model: RidgeModel,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Frame:
    """
    Höchstens max_steps Schritte Steepest Descent in U bei festem θ

    Abbruch bei ‖Ḡ‖_F ≤ 1e-10·(1 + J) oder erschöpfter Liniensuche
    (Stagnation, kein Fehler). Das Residuum nimmt über akzeptierte
    Schritte nicht zu.

    Returns:
        Frame in Vorzeichenkonvention; θ ist für diesen Frame neu anzupassen
    """
    U, _, _ = _descend(samples.X, samples.f, _frame_array(model.U), model.poly, max_steps)
    return Frame.from_array(U)


def _theta_step(
    X: np.ndarray,
    f: np.ndarray,
    U: np.ndarray,
    basis: MultiIndexBasis,
    previous: Optional[tuple[PolyModel, float]],
) -> tuple[PolyModel, float]:
    poly = _fit(X, f, U, basis)
    J = _objective(X, f, U, poly)
    # θ-Schritt ist eine exakte Projektion: das vorige θ bleibt zulässig
    if previous is not None and J > previous[1]:
        return previous
    return poly, J


def alternate_fit(
    samples: LabeledSamples,
    n: int,
    N: int,
    U0: Frame,
    P: int = DEFAULT_ITERATIONS,
    max_steps: int = DEFAULT_MAX_STEPS,
    init: str = "",
    seed: Optional[int] = None,
) -> RidgeModel:
    """
    Alternierende Minimierung über θ (kleinste Quadrate) und U (Grassmann-Abstieg)

    Args:
        samples: Trainingsdaten
        n: Anzahl Ridge-Richtungen
        N: Totalgrad des Polynoms
        U0: Startwert (m×n)
        P: Anzahl Iterationen (≥ 0)
        max_steps: Abstiegsschritte pro Iteration
        init, seed: Metadaten des Startwerts

    Returns:
        RidgeModel mit finalem (U, θ); θ ist für das zurückgegebene U optimal.
        history enthält pro Iteration eine theta- und eine grassmann-Zeile
        und am Ende die Zeile der abschließenden θ-Anpassung (Iteration P).
    """
    if P < 0:
        raise PolyRidgeError("P muss ≥ 0 sein")
    if U0.n != n:
        raise PolyRidgeError(f"Startwert hat {U0.n} Spalten, erwartet {n}")
    if U0.m != samples.m:
        raise PolyRidgeError("Startwert passt nicht zur Eingabedimension")

    X, f = samples.X, samples.f
    basis = multi_indices(n, N)
    U = np.array(U0.entries)
    history: list[HistoryRow] = []
    state: Optional[tuple[PolyModel, float]] = None

    for iteration in range(P):
        state = _theta_step(X, f, U, basis, state)
        history.append(HistoryRow(iteration, "theta", state[1]))

        U, J, steps = _descend(X, f, U, state[0], max_steps)
        state = (state[0], J)
        history.append(HistoryRow(iteration, "grassmann", J))
        logger.debug("Iteration %d: Residuum %.6e nach %d Schritten", iteration, J, steps)

    poly, J = _theta_step(X, f, U, basis, state)
    history.append(HistoryRow(P, "theta", J))

    frame, poly = _canonicalize(U, poly)
    return RidgeModel(U=frame, poly=poly, history=tuple(history), init=init, seed=seed)


def predict(model: RidgeModel, X) -> np.ndarray:
    """p_N(Uᵀx_i, θ) für alle Zeilen von X"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.m:
        raise PolyRidgeError(f"Eingaben haben {X.shape[1]} Spalten, Modell erwartet {model.m}")
    return model.poly.evaluate(X @ _frame_array(model.U))


def test_error(model: RidgeModel, samples: LabeledSamples) -> float:
    """
    Mittlerer relativer punktweiser Fehler auf Testdaten

    Raises:
        PolyRidgeError: "relative error undefined" bei f_j = 0
    """
    if np.any(samples.f == 0.0):
        raise PolyRidgeError("relative error undefined: Testdaten enthalten f = 0")
    fhat = predict(model, samples.X)
    return float(np.mean(np.abs(samples.f - fhat) / np.abs(samples.f)))


# pytest soll die Funktion nicht als Test einsammeln
test_error.__test__ = False  # type: ignore[attr-defined]
