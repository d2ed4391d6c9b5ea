"""
Quadratur-Orakel für standardnormalverteiltes ρ

Liefert Referenzwerte, gegen die die stichprobenbasierten Verfahren geprüft werden:
- Gauß-Hermite-Regeln (probabilistische Normierung, Σw = 1)
- bedingter Mittelwert µ(y) = E[f(Uy + Vz)], z ~ N(0, I)
- Zielfunktion R(U) = ½‖f − µ(Uᵀx)‖²
- C per Tensorquadratur, Winkel-Sweep für bivariate Funktionen
- Grassmann-Gradient von R per finiten Differenzen und die Schranke für
  die Beinahe-Stationarität des inaktiven Unterraums
- eingebaute Testfunktionen mit analytischem Gradienten

Quadratur in Frame-Koordinaten:
R wird auf dem Tensorgitter in (y, z) mit x = Uy + Vz ausgewertet. Da ρ
rotationsinvariant ist, ist das eine gültige Tensorregel für dasselbe
Integral; µ wird dann nur an den q^n Knoten in y benötigt.

Bekannte Abweichung (siehe docs/bivariate_referenz.md):
Für f = 5x₁ + sin(10πx₂) löst die 101-Punkt-Regel sin(10πx₂) nicht auf
und liefert C₂₂ ≈ 526, der analytische Wert ist 50π²(1 + e^{−200π²}) ≈ 493.48.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_hermitenorm

from src.activesubspace import GradientSet, SpectrumEstimate, inactive_frame
from src.linalg import Frame, canonical_basis, complement, polar_factor, sym_eig_desc
from src.polyridge import PolyModel, multi_indices
from src.sampling import make_rng

logger = logging.getLogger(__name__)

MAX_TENSOR_DIM = 4
DEFAULT_FD_STEP = 1e-5
BOUND_ATOL = 1e-6
PUBLISHED_C22 = 526.4
BIVARIATE_LIPSCHITZ = 32.0

# Obergrenze der gleichzeitig ausgewerteten Punkte pro Block
_CHUNK_POINTS = 2_000_000


class OracleError(ValueError):
    """Fehler im Quadratur-Orakel"""
    pass


@dataclass(frozen=True)
class GaussHermiteRule:
    """
    q-Punkt-Gauß-Hermite-Regel zur Standardnormaldichte

    Attributes:
        order: Anzahl Knoten q
        nodes: symmetrische Knoten
        weights: Gewichte mit Σw = 1
    """
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        """Validierung"""
        if self.nodes.shape != (self.order,) or self.weights.shape != (self.order,):
            raise ValueError("Knoten und Gewichte müssen Länge q haben")
        if abs(self.weights.sum() - 1.0) > 1e-13:
            raise ValueError("Gewichte summieren nicht zu 1")
        if self.order >= 2 and abs(self.weights @ self.nodes ** 2 - 1.0) > 1e-12:
            raise ValueError("Zweites Moment der Regel ist nicht 1")
        if np.any(self.nodes + self.nodes[::-1] != 0.0):
            raise ValueError("Knoten sind nicht symmetrisch")


def gauss_hermite(q: int) -> GaussHermiteRule:
    """
    Gauß-Hermite-Regel zur Dichte exp(−x²/2)/√(2π)

    Exakt für Polynome bis Grad 2q−1.
    """
    if q < 1:
        raise OracleError("Quadraturordnung muss ≥ 1 sein")
    nodes, weights = roots_hermitenorm(q)
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    return GaussHermiteRule(order=q, nodes=nodes, weights=weights)


def tensor_rule(rule: GaussHermiteRule, d: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Tensorprodukt einer 1D-Regel in d Dimensionen

    Returns:
        (Knoten q^d × d, Gewichte q^d); für d = 0 ein Knoten mit Gewicht 1
    """
    if d == 0:
        return np.zeros((1, 0)), np.ones(1)
    nodes = np.array(list(product(rule.nodes, repeat=d)))
    weights = np.prod(np.array(list(product(rule.weights, repeat=d))), axis=1)
    return nodes, weights


@dataclass(frozen=True)
class TestFunction:
    """
    Testfunktion f: R^m → R mit analytischem Gradienten

    Attributes:
        name: Bezeichnung des Bausteins
        dim: Umgebungsdimension m
        value: X (K×m) → f-Werte (K)
        gradient: X (K×m) → Gradienten (K×m)
        params: Parameter (JSON-fähig)
        lipschitz: bekannte obere Schranke für sup‖∇f‖ (optional)
    """
    __test__ = False

    name: str
    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    lipschitz: Optional[float] = None

    def __call__(self, X) -> np.ndarray:
        return self.value(np.atleast_2d(np.asarray(X, dtype=float)))

    def grad(self, X) -> np.ndarray:
        return self.gradient(np.atleast_2d(np.asarray(X, dtype=float)))

    def descriptor(self) -> dict:
        return {"name": self.name, "dim": self.dim, **self.params}


def _bivariate() -> TestFunction:
    def value(X):
        return 5.0 * X[:, 0] + np.sin(10.0 * np.pi * X[:, 1])

    def gradient(X):
        return np.column_stack([
            np.full(X.shape[0], 5.0),
            10.0 * np.pi * np.cos(10.0 * np.pi * X[:, 1]),
        ])

    # sup‖∇f‖ = √(25 + 100π²) ≈ 31.78
    return TestFunction("bivariate", 2, value, gradient, {}, BIVARIATE_LIPSCHITZ)


def _quadratic(A=None, b=None) -> TestFunction:
    A = np.diag([3.0, 1.0]) if A is None else np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or np.max(np.abs(A - A.T)) > 0.0:
        raise OracleError("quadratic benötigt eine symmetrische Matrix A")
    b = np.zeros(A.shape[0]) if b is None else np.asarray(b, dtype=float).reshape(-1)

    def value(X):
        return 0.5 * np.einsum("ij,jk,ik->i", X, A, X) + X @ b

    def gradient(X):
        return X @ A + b

    return TestFunction("quadratic", A.shape[0], value, gradient,
                        {"A": A.tolist(), "b": b.tolist()})


def _random_profile(n: int, degree: int, rng: np.random.Generator) -> PolyModel:
    basis = multi_indices(n, degree)
    theta = rng.standard_normal(basis.count)
    # lineare Terme ≠ 0, damit E[∇g ∇gᵀ] vollen Rang hat
    linear = basis.indices.sum(axis=1) == 1
    theta[linear] = np.sign(theta[linear]) * (1.0 + np.abs(theta[linear]))
    return PolyModel(basis=basis, theta=theta, y_scale=np.ones(n))


def _exact_ridge(U_star=None, profile=None, m: int = 3, n: int = 1,
                 degree: int = 3, seed: int = 0) -> TestFunction:
    rng = make_rng(seed)
    if U_star is None:
        Q, _ = np.linalg.qr(rng.standard_normal((m, n)))
        U_star = Q
    U_star = np.asarray(U_star, dtype=float)
    if profile is None:
        profile = _random_profile(U_star.shape[1], degree, rng)
    elif isinstance(profile, dict):
        profile = PolyModel.from_dict(profile)

    def value(X):
        return profile.evaluate(X @ U_star)

    def gradient(X):
        return profile.gradient(X @ U_star) @ U_star.T

    return TestFunction("exact_ridge", U_star.shape[0], value, gradient,
                        {"U_star": U_star.tolist(), "profile": profile.to_dict()})


def _perturbed_ridge(epsilon: float = 1e-2, **ridge_params) -> TestFunction:
    ridge = _exact_ridge(**ridge_params)

    def value(X):
        return ridge.value(X) + epsilon * np.sin(X).sum(axis=1)

    def gradient(X):
        return ridge.gradient(X) + epsilon * np.cos(X)

    return TestFunction("perturbed_ridge", ridge.dim, value, gradient,
                        {**ridge.params, "epsilon": epsilon})


def _padded(inner="bivariate", m: int = 3, ignored=(2,), **inner_params) -> TestFunction:
    h = inner if isinstance(inner, TestFunction) else builtin(inner, **inner_params)
    ignored = sorted(int(i) for i in ignored)
    keep = [j for j in range(m) if j not in ignored]
    if len(keep) != h.dim:
        raise OracleError(f"padded: {len(keep)} aktive Koordinaten, innere Funktion hat {h.dim}")

    def value(X):
        return h.value(X[:, keep])

    def gradient(X):
        G = np.zeros_like(X)
        G[:, keep] = h.gradient(X[:, keep])
        return G

    return TestFunction("padded", m, value, gradient,
                        {"inner": h.descriptor(), "ignored": ignored}, h.lipschitz)


_BUILTINS = {
    "bivariate": _bivariate,
    "quadratic": _quadratic,
    "exact_ridge": _exact_ridge,
    "perturbed_ridge": _perturbed_ridge,
    "padded": _padded,
}


def builtin(name: str, **params) -> TestFunction:
    """
    Eingebaute Testfunktion

    Namen:
        bivariate: 5x₁ + sin(10πx₂)
        quadratic(A, b): ½xᵀAx + bᵀx
        exact_ridge(U_star, profile | m, n, degree, seed): g(U*ᵀx), g Polynom
        perturbed_ridge(epsilon, ...): exact_ridge + ε·Σ sin(x_i)
        padded(inner, m, ignored): innere Funktion, die Koordinaten ignoriert

    Raises:
        OracleError: bei unbekanntem Namen
    """
    if name not in _BUILTINS:
        raise OracleError(f"Unbekannte Testfunktion: {name}")
    return _BUILTINS[name](**params)


def bivariate_reference() -> dict[str, float]:
    """Analytische Referenzwerte der bivariaten Funktion unter Standardnormalverteilung"""
    damping = np.exp(-200.0 * np.pi ** 2)
    return {
        "C11": 25.0,
        "C22": 50.0 * np.pi ** 2 * (1.0 + damping),
        "C22_published": PUBLISHED_C22,
        "R_e1": 0.25 * (1.0 - damping),
        "R_e2": 12.5,
    }


def _check_gaussian(density: str):
    if density != "gaussian":
        raise OracleError(f"unsupported density: {density} (nur 'gaussian')")


def _check_tensor_dim(m: int):
    if m > MAX_TENSOR_DIM:
        raise OracleError(f"tensor quadrature infeasible: m = {m} > {MAX_TENSOR_DIM}")


def _chunks(total: int, per_item: int):
    size = max(1, _CHUNK_POINTS // max(per_item, 1))
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))


def _mu(f: TestFunction, U: np.ndarray, V: np.ndarray, Y: np.ndarray,
        Z: np.ndarray, wz: np.ndarray) -> np.ndarray:
    """µ an den Zeilen von Y, innere Regel (Z, wz) im Komplement"""
    shift = Z @ V.T
    mu = np.empty(Y.shape[0])
    for block in _chunks(Y.shape[0], Z.shape[0]):
        X = (Y[block] @ U.T)[:, None, :] + shift[None, :, :]
        vals = f.value(X.reshape(-1, U.shape[0])).reshape(X.shape[0], Z.shape[0])
        mu[block] = vals @ wz
    return mu


def conditional_mean_mu(
    f: TestFunction,
    U: Frame,
    y,
    inner_rule: GaussHermiteRule,
    density: str = "gaussian",
):
    """
    Bedingter Mittelwert µ(y) = Σ_k w_k f(Uy + V z_k)

    Args:
        f: Testfunktion
        U: Frame m×n
        y: n-Vektor oder K×n-Matrix
        inner_rule: 1D-Regel, als Tensorregel im (m−n)-dim Komplement
        density: nur "gaussian"

    Returns:
        Skalar für einen n-Vektor, sonst Array der Länge K

    Raises:
        OracleError: "unsupported density"
    """
    _check_gaussian(density)
    y_arr = np.asarray(y, dtype=float)
    Y = y_arr.reshape(-1, U.n)
    V = canonical_basis(complement(U))
    Z, wz = tensor_rule(inner_rule, U.m - U.n)
    mu = _mu(f, np.asarray(U.entries), np.asarray(V.entries), Y, Z, wz)
    return float(mu[0]) if y_arr.ndim <= 1 else mu


def ridge_error_R(
    f: TestFunction,
    U: Frame,
    outer_rule: GaussHermiteRule,
    inner_rule: Optional[GaussHermiteRule] = None,
    density: str = "gaussian",
) -> float:
    """
    R(U) = ½ Σ w (f(x) − µ(Uᵀx))² über das äußere Tensorgitter

    Das Gitter liegt in den Koordinaten (y, z) der kanonischen Basen von
    span(U) und seinem Komplement; R hängt damit nur von span(U) ab. Die
    innere Regel (Standard: äußere Regel) berechnet µ.

    Raises:
        OracleError: "tensor quadrature infeasible" für m > 4
    """
    _check_gaussian(density)
    _check_tensor_dim(U.m)
    inner_rule = inner_rule or outer_rule
    m, n = U.m, U.n
    # Gitter in Koordinaten, die nur von span(U) abhängen
    Ua = np.asarray(canonical_basis(U).entries)
    Va = np.asarray(canonical_basis(complement(U)).entries)

    Y, wy = tensor_rule(outer_rule, n)
    Zo, wzo = tensor_rule(outer_rule, m - n)
    Zi, wzi = tensor_rule(inner_rule, m - n)
    shift = Zo @ Va.T

    total = 0.0
    for block in _chunks(Y.shape[0], Zo.shape[0] + Zi.shape[0]):
        mu = _mu(f, Ua, Va, Y[block], Zi, wzi)
        X = (Y[block] @ Ua.T)[:, None, :] + shift[None, :, :]
        vals = f.value(X.reshape(-1, m)).reshape(X.shape[0], Zo.shape[0])
        total += float(wy[block] @ (((vals - mu[:, None]) ** 2) @ wzo))
    return 0.5 * total


def estimate_C_quadrature(f: TestFunction, m: int, rule: GaussHermiteRule) -> SpectrumEstimate:
    """
    C = Σ w ∇f(x) ∇f(x)ᵀ über das Tensorgitter, mit Eigenzerlegung

    Raises:
        OracleError: "tensor quadrature infeasible" für m > 4
    """
    _check_tensor_dim(m)
    if f.dim != m:
        raise OracleError(f"Testfunktion hat Dimension {f.dim}, erwartet {m}")
    X, w = tensor_rule(rule, m)
    C = np.zeros((m, m))
    for block in _chunks(X.shape[0], m):
        G = f.gradient(X[block])
        C += (G * w[block, None]).T @ G
    C = 0.5 * (C + C.T)
    return SpectrumEstimate(spectrum=sym_eig_desc(C), sample_count=X.shape[0], C_hat=C)


@dataclass(frozen=True)
class SweepTable:
    """
    R entlang U(α) = [cos α, sin α]ᵀ

    Attributes:
        alpha: Winkel in [0, π]
        R: Zielfunktionswerte
    """
    alpha: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        """Validierung"""
        if self.alpha.shape != self.R.shape:
            raise ValueError("alpha und R müssen gleich lang sein")
        if np.any(self.R < 0.0):
            raise ValueError("R muss nichtnegativ sein")

    def nearest(self, alpha: float) -> int:
        """Index des Gitterpunkts mit dem kleinsten Abstand zu alpha"""
        return int(np.argmin(np.abs(self.alpha - alpha)))


def angle_frame(alpha: float) -> Frame:
    """Frame span([cos α, sin α]ᵀ)"""
    return Frame.from_array(np.array([[np.cos(alpha)], [np.sin(alpha)]]))


def sweep_angle(
    f: TestFunction,
    n_angles: int,
    outer_q: int,
    inner_q: Optional[int] = None,
    workers: int = 1,
) -> SweepTable:
    """
    R(α) für gleichmäßig verteilte α ∈ [0, π] (Endpunkte eingeschlossen)

    Zeilen sind unabhängig und können parallel laufen; jede Zeile summiert
    in fester Reihenfolge, das Ergebnis hängt nicht von workers ab.
    """
    if f.dim != 2:
        raise OracleError("Winkel-Sweep nur für bivariate Funktionen")
    if n_angles < 2:
        raise OracleError("Winkel-Sweep benötigt mindestens 2 Winkel")
    outer = gauss_hermite(outer_q)
    inner = gauss_hermite(inner_q) if inner_q else outer
    alpha = np.linspace(0.0, np.pi, n_angles)

    def row(a: float) -> float:
        return ridge_error_R(f, angle_frame(a), outer, inner)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(row, alpha))
    else:
        values = [row(a) for a in alpha]
    return SweepTable(alpha=alpha, R=np.array(values))


def grassmann_grad_R_fd(
    f: TestFunction,
    V: Frame,
    fd_step: float = DEFAULT_FD_STEP,
    outer_rule: Optional[GaussHermiteRule] = None,
    inner_rule: Optional[GaussHermiteRule] = None,
) -> tuple[np.ndarray, float]:
    """
    Grassmann-Gradient von R(V) per zentraler finiter Differenzen

    V ist die Komplement-Basis (m×(m−n)); U = complement(V). Die Tangential-
    basis T_ij = B·e_i e_jᵀ mit B = complement(V) ist Frobenius-orthonormal,
    jede Richtung wird über die Polar-Retraktion von V ± h·T_ij ausgewertet.

    Returns:
        (Tangentialmatrix m×(m−n), Frobeniusnorm)
    """
    outer_rule = outer_rule or gauss_hermite(101)
    Va = np.asarray(V.entries)
    B = np.asarray(complement(V).entries)
    n, k = B.shape[1], Va.shape[1]

    def R_at(Vp: np.ndarray) -> float:
        U = complement(Frame.from_array(polar_factor(Vp)))
        return ridge_error_R(f, U, outer_rule, inner_rule)

    coeffs = np.zeros((n, k))
    for i in range(n):
        for j in range(k):
            T = np.zeros((n, k))
            T[i, j] = 1.0
            T = B @ T
            coeffs[i, j] = (R_at(Va + fd_step * T) - R_at(Va - fd_step * T)) / (2.0 * fd_step)
    return B @ coeffs, float(np.linalg.norm(coeffs))


def near_stationary_bound(L: float, m: int, n: int, tail) -> float:
    """
    Schranke L·(2√m + √(m−n))·√(Σ tail) für ‖∇̄R‖ am inaktiven Unterraum

    Poincaré-Konstante 1 (Standardnormalverteilung).

    Raises:
        OracleError: bei negativem tail oder L ≤ 0
    """
    tail = np.asarray(tail, dtype=float).reshape(-1)
    if np.any(tail < 0.0):
        raise OracleError("tail-Eigenwerte müssen nichtnegativ sein")
    if L <= 0.0:
        raise OracleError("Lipschitz-Konstante muss positiv sein")
    return float(L * (2.0 * np.sqrt(m) + np.sqrt(m - n)) * np.sqrt(tail.sum()))


def lipschitz_estimate(G: GradientSet) -> float:
    """max_i ‖g_i‖₂ (untere Schranke für L = sup‖∇f‖)"""
    return float(np.max(np.linalg.norm(G.rows, axis=1)))


@dataclass(frozen=True)
class BoundReport:
    """Ergebnis der numerischen Prüfung der Beinahe-Stationarität"""
    function: str
    m: int
    n: int
    grad_norm: float
    bound: float
    lipschitz: float
    tail: list[float]
    ok: bool

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "m": self.m,
            "n": self.n,
            "grad_norm": self.grad_norm,
            "bound": self.bound,
            "lipschitz": self.lipschitz,
            "tail": self.tail,
            "ok": self.ok,
        }


def check_bound(
    f: TestFunction,
    n: int,
    outer_q: int = 101,
    inner_q: Optional[int] = None,
    lipschitz: Optional[float] = None,
    fd_step: float = DEFAULT_FD_STEP,
) -> BoundReport:
    """
    Vergleicht ‖∇̄R(W₂)‖_F (finite Differenzen) mit der Schranke

    W₂ und tail = λ_{n+1}…λ_m stammen aus C per Tensorquadratur. L ist in
    dieser Reihenfolge: Argument, bekannte Schranke der Funktion, Maximum
    von ‖∇f‖ auf den Quadraturknoten.
    """
    m = f.dim
    outer = gauss_hermite(outer_q)
    inner = gauss_hermite(inner_q) if inner_q else outer
    estimate = estimate_C_quadrature(f, m, outer)
    # Rundungsreste unterhalb von 0 zählen als 0
    tail = np.maximum(np.asarray(estimate.eigenvalues[n:]), 0.0)
    W2 = inactive_frame(estimate, n)
    _, grad_norm = grassmann_grad_R_fd(f, W2, fd_step, outer, inner)

    if lipschitz is None:
        lipschitz = f.lipschitz
    if lipschitz is None:
        X, _ = tensor_rule(outer, m)
        lipschitz = lipschitz_estimate(GradientSet(f.grad(X)))
    bound = near_stationary_bound(lipschitz, m, n, tail)
    logger.info("Gradientnorm %.3e, Schranke %.3e", grad_norm, bound)
    return BoundReport(
        function=f.name,
        m=m,
        n=n,
        grad_norm=grad_norm,
        bound=bound,
        lipschitz=float(lipschitz),
        tail=tail.tolist(),
        ok=bool(grad_norm <= bound + BOUND_ATOL),
    )
