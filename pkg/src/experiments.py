"""
Experimente rund um aktive Unterräume und Ridge-Approximation

Funktionsweise:
1. monte_carlo_convergence: Fehler errΛ / errW der Monte-Carlo-Schätzung von C
   gegenüber einer Referenz für wachsende Stichprobengrößen (erste N Zeilen
   eines Designs), gemittelt über Seeds, mit log-log-Steigung
2. compare_initializations: alternierende Minimierung mit aktivem Unterraum,
   Einheitsmatrix und zufälligen Startwerten auf denselben Daten
3. training_size_study: Testfehler als Funktion der Trainingsgröße M

Design-Entscheidung:
- Teilmengen sind Präfixe eines festen Designs (keine Neu-Stratifizierung),
  damit größere Stichproben die kleineren enthalten
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from src.activesubspace import (
    GradientSet,
    SpectrumEstimate,
    active_frame,
    error_metrics,
    estimate_C,
)
from src.csv_exporter import history_table
from src.linalg import Frame
from src.oracle import TestFunction
from src.polyridge import (
    DEFAULT_ITERATIONS,
    DEFAULT_MAX_STEPS,
    LabeledSamples,
    RidgeModel,
    alternate_fit,
    identity_frame,
    multi_indices,
    random_frame,
    test_error,
)
from src.sampling import gaussian_design, latin_hypercube, prefix

logger = logging.getLogger(__name__)

INIT_MODES = ("active", "identity", "random")
DEFAULT_RANDOM_SEEDS = tuple(range(10))


class ExperimentError(ValueError):
    """Fehler in der Konfiguration eines Experiments"""
    pass


def initial_frame(
    mode: str,
    m: int,
    n: int,
    estimate: Optional[SpectrumEstimate] = None,
    seed: Optional[int] = None,
) -> Frame:
    """
    Startwert U₀ für die alternierende Minimierung

    Args:
        mode: active (erste n Eigenvektoren), identity (erste n Spalten von I)
            oder random (orthonormalisierte Zufallsmatrix)
        estimate: Spektrum, erforderlich für active
        seed: Seed für random (Standard 0)

    Raises:
        ExperimentError: bei unbekanntem Modus, fehlendem oder unpassendem Spektrum
    """
    if mode not in INIT_MODES:
        raise ExperimentError(f"Unbekannter Startwert: {mode} (erlaubt: {', '.join(INIT_MODES)})")
    if mode == "active":
        if estimate is None:
            raise ExperimentError("Startwert active benötigt ein Spektrum")
        if estimate.m != m:
            raise ExperimentError(f"Spektrum hat Dimension {estimate.m}, Daten haben {m}")
        return active_frame(estimate, n)
    if mode == "identity":
        return identity_frame(m, n)
    return random_frame(m, n, 0 if seed is None else seed)


@dataclass(frozen=True)
class ConvergenceStudy:
    """
    Mittlere Schätzfehler pro Stichprobengröße

    Attributes:
        sizes: Stichprobengrößen N
        err_lambda: mittleres errΛ pro N
        err_w: mittleres errW pro N
        seed_count: Anzahl gemittelter Seeds
    """
    sizes: np.ndarray
    err_lambda: np.ndarray
    err_w: np.ndarray
    seed_count: int

    @staticmethod
    def _slope(sizes: np.ndarray, errors: np.ndarray) -> float:
        return float(np.polyfit(np.log10(sizes), np.log10(errors), 1)[0])

    @property
    def slope_lambda(self) -> float:
        """Steigung von log errΛ über log N (erwartet ≈ −½)"""
        return self._slope(self.sizes, self.err_lambda)

    @property
    def slope_w(self) -> float:
        """Steigung von log errW über log N"""
        return self._slope(self.sizes, self.err_w)

    def to_table(self) -> pd.DataFrame:
        return pd.DataFrame({"N": self.sizes, "err_lambda": self.err_lambda, "err_w": self.err_w})


def monte_carlo_convergence(
    f: TestFunction,
    reference: SpectrumEstimate,
    sizes: Sequence[int],
    seeds: Iterable[int] = DEFAULT_RANDOM_SEEDS,
    design: str = "gaussian",
) -> ConvergenceStudy:
    """
    Konvergenz der Monte-Carlo-Schätzung von C

    Pro Seed wird ein Design der Größe max(sizes) erzeugt; für jedes N
    dienen dessen erste N Zeilen als Stichprobe.

    Args:
        f: Testfunktion mit Gradient
        reference: Referenzspektrum (z.B. analytic_quadratic_C)
        sizes: Stichprobengrößen (aufsteigend, mindestens zwei)
        seeds: Seeds der Designs
        design: gaussian oder lhs
    """
    sizes_arr = np.asarray(sorted(int(s) for s in sizes))
    if sizes_arr.size < 2 or sizes_arr[0] < 1:
        raise ExperimentError("Mindestens zwei positive Stichprobengrößen erforderlich")
    if design not in ("gaussian", "lhs"):
        raise ExperimentError(f"Unbekanntes Design: {design}")
    if reference.m != f.dim:
        raise ExperimentError("Referenz passt nicht zur Dimension der Funktion")

    seeds = list(seeds)
    errors = np.zeros((len(seeds), sizes_arr.size, 2))
    for i, seed in enumerate(seeds):
        make = gaussian_design if design == "gaussian" else latin_hypercube
        full = make(int(sizes_arr[-1]), f.dim, seed)
        G = f.grad(full.points)
        for j, size in enumerate(sizes_arr):
            rows = prefix(full, int(size)).points
            estimate = estimate_C(GradientSet(G[: rows.shape[0]]))
            errors[i, j] = error_metrics(reference, estimate)

    mean = errors.mean(axis=0)
    study = ConvergenceStudy(sizes=sizes_arr, err_lambda=mean[:, 0], err_w=mean[:, 1],
                             seed_count=len(seeds))
    logger.info("Monte-Carlo-Konvergenz: Steigung errΛ %.3f", study.slope_lambda)
    return study


@dataclass
class InitComparison:
    """
    Ergebnis eines Startwertvergleichs

    Attributes:
        n, N: Ridge-Dimension und Polynomgrad
        models: angepasstes Modell pro Bezeichnung (active, identity, random-<seed>)
    """
    n: int
    N: int
    models: dict[str, RidgeModel] = field(default_factory=dict)

    def final_residuals(self) -> dict[str, float]:
        return {label: float(model.residual_final) for label, model in self.models.items()}

    def random_median(self) -> float:
        """Median der finalen Residuen aller zufälligen Startwerte"""
        values = [r for label, r in self.final_residuals().items() if label.startswith("random")]
        if not values:
            raise ExperimentError("Keine zufälligen Startwerte im Vergleich")
        return float(np.median(values))

    def to_table(self) -> pd.DataFrame:
        """Alle Verläufe als Tabelle label,iter,phase,residual"""
        return pd.concat(
            [history_table(model.history, label) for label, model in self.models.items()],
            ignore_index=True,
        )


def compare_initializations(
    samples: LabeledSamples,
    n: int,
    N: int,
    estimate: Optional[SpectrumEstimate] = None,
    random_seeds: Iterable[int] = DEFAULT_RANDOM_SEEDS,
    P: int = DEFAULT_ITERATIONS,
    max_steps: int = DEFAULT_MAX_STEPS,
    include_identity: bool = True,
) -> InitComparison:
    """
    Alternierende Minimierung von mehreren Startwerten aus

    Args:
        samples: Trainingsdaten
        n, N: Ridge-Dimension und Polynomgrad
        estimate: Spektrum für den active-Startwert (ohne: kein active-Lauf)
        random_seeds: Seeds der zufälligen Startwerte
        P, max_steps: Parameter der alternierenden Minimierung
        include_identity: Lauf mit den ersten n Spalten der Einheitsmatrix
    """
    comparison = InitComparison(n=n, N=N)
    runs: list[tuple[str, str, Optional[int]]] = []
    if estimate is not None:
        runs.append(("active", "active", None))
    if include_identity:
        runs.append(("identity", "identity", None))
    runs.extend((f"random-{seed}", "random", seed) for seed in random_seeds)

    for label, mode, seed in runs:
        U0 = initial_frame(mode, samples.m, n, estimate, seed)
        comparison.models[label] = alternate_fit(samples, n, N, U0, P=P, max_steps=max_steps,
                                                 init=mode, seed=seed)
        logger.debug("%s: finales Residuum %.6e", label, comparison.models[label].residual_final)
    return comparison


def training_size_study(
    train: LabeledSamples,
    test: LabeledSamples,
    sizes: Sequence[int],
    n: int,
    N: int,
    estimate: Optional[SpectrumEstimate] = None,
    modes: Sequence[str] = INIT_MODES,
    random_seeds: Iterable[int] = DEFAULT_RANDOM_SEEDS,
    P: int = DEFAULT_ITERATIONS,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> pd.DataFrame:
    """
    Testfehler als Funktion der Trainingsgröße M

    Trainiert auf den ersten M Paaren von train und misst den mittleren
    relativen Fehler auf test. Für random wird über alle Seeds gemittelt.
    Größen, für die M kleiner als die Anzahl Basisfunktionen ist, werden
    übersprungen.

    Returns:
        DataFrame mit Spalten M, init, test_error
    """
    random_seeds = list(random_seeds)
    count = multi_indices(n, N).count
    rows = []
    for size in sorted(int(s) for s in sizes):
        if size > train.M:
            raise ExperimentError(f"Trainingsgröße {size} > verfügbare {train.M} Paare")
        if size < count:
            logger.warning("M = %d zu klein für %d Basisfunktionen, übersprungen", size, count)
            continue
        subset = train.head(size)
        for mode in modes:
            seeds: list[Optional[int]] = list(random_seeds) if mode == "random" else [None]
            errors = [
                test_error(
                    alternate_fit(subset, n, N, initial_frame(mode, train.m, n, estimate, seed),
                                  P=P, max_steps=max_steps, init=mode, seed=seed),
                    test,
                )
                for seed in seeds
            ]
            rows.append({"M": size, "init": mode, "test_error": float(np.mean(errors))})
    return pd.DataFrame(rows, columns=["M", "init", "test_error"])
