"""
CSV- und JSON-Export für Designs, Vorhersagen, Verläufe und Tabellen

Alle Gleitkommazahlen werden mit 17 signifikanten Stellen geschrieben,
Zeilenende ist immer \\n. Wiederholte Läufe erzeugen byte-identische Dateien.
"""
import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.activesubspace import BootstrapSummary, SpectrumEstimate
from src.oracle import SweepTable
from src.polyridge import HistoryRow, LabeledSamples, RidgeModel
from src.sampling import Design

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
SHADOW_CURVE_POINTS = 200
SHADOW_GRID_SIDE = 50


class CsvExportError(Exception):
    """Fehler beim Schreiben einer Ausgabedatei"""
    pass


def shadow_table(model: RidgeModel, samples: LabeledSamples) -> pd.DataFrame:
    """
    Tabelle für Shadow-Plots

    n = 1: Spalten y,f; erst die M Zeilen (uᵀx_i, f_i), danach 200
    Gitterpunkte über [min y, max y] mit p(y).
    n = 2: Spalten y1,y2,f; nach den M Stichproben ein 50×50-Gitter von p.

    Raises:
        ValueError: bei n > 2 ("shadow plots require n ≤ 2")
    """
    if model.n > 2:
        raise ValueError("shadow plots require n ≤ 2")
    Y = samples.X @ model.U.entries
    names = ["y"] if model.n == 1 else ["y1", "y2"]

    scatter = pd.DataFrame(Y, columns=names)
    scatter["f"] = samples.f

    if model.n == 1:
        grid = np.linspace(Y[:, 0].min(), Y[:, 0].max(), SHADOW_CURVE_POINTS)[:, None]
    else:
        axes = [np.linspace(Y[:, j].min(), Y[:, j].max(), SHADOW_GRID_SIDE) for j in range(2)]
        g1, g2 = np.meshgrid(*axes, indexing="ij")
        grid = np.column_stack([g1.ravel(), g2.ravel()])
    curve = pd.DataFrame(grid, columns=names)
    curve["f"] = model.poly.evaluate(grid)
    return pd.concat([scatter, curve], ignore_index=True)


class CsvExporter:
    """
    Schreibt Ergebnistabellen als CSV und Dokumente als JSON

    Features:
    - Kopfzeile immer vorhanden, keine Indexspalte
    - 17 signifikante Stellen
    - Zielverzeichnis wird bei Bedarf angelegt
    """

    def __init__(self, float_format: str = FLOAT_FORMAT):
        """
        Initialisiert den Exporter

        Args:
            float_format: printf-Format für Gleitkommazahlen
        """
        self._float_format = float_format

    def write_table(self, table: pd.DataFrame, filepath: str):
        """
        Schreibt eine Tabelle

        Raises:
            CsvExportError: Bei Fehlern während des Exports
        """
        try:
            path = Path(filepath)
            path.parent.mkdir(parents=True, exist_ok=True)
            table.to_csv(path, index=False, float_format=self._float_format,
                         lineterminator="\n")
        except PermissionError as e:
            raise CsvExportError(
                f"Datei ist möglicherweise geöffnet oder schreibgeschützt: {filepath}"
            ) from e
        except OSError as e:
            raise CsvExportError(f"Fehler beim Schreiben von {filepath}: {e}") from e
        logger.debug("%d Zeilen nach %s geschrieben", len(table), filepath)

    def write_json(self, document: dict, filepath: str):
        """
        Schreibt ein JSON-Dokument (Schlüsselreihenfolge bleibt erhalten)

        Raises:
            CsvExportError: Bei Fehlern während des Exports
        """
        try:
            path = Path(filepath)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                json.dump(document, f, indent=2, sort_keys=False)
                f.write("\n")
        except OSError as e:
            raise CsvExportError(f"Fehler beim Schreiben von {filepath}: {e}") from e

    def write_design(self, design: Design, filepath: str, f: Optional[np.ndarray] = None):
        """Design mit Spalten x1…xm (optional Ausgabespalte f)"""
        table = pd.DataFrame(design.points, columns=[f"x{j + 1}" for j in range(design.m)])
        if f is not None:
            table["f"] = f
        self.write_table(table, filepath)

    def write_samples(self, samples: LabeledSamples, filepath: str):
        """Stichproben mit Spalten x1…xm,f"""
        table = pd.DataFrame(samples.X, columns=[f"x{j + 1}" for j in range(samples.m)])
        table["f"] = samples.f
        self.write_table(table, filepath)

    def write_gradients(self, G: np.ndarray, filepath: str):
        """Gradienten mit Spalten g1…gm"""
        self.write_table(pd.DataFrame(G, columns=[f"g{j + 1}" for j in range(G.shape[1])]), filepath)

    def write_predictions(self, fhat: np.ndarray, filepath: str):
        """Vorhersagen in der Spalte fhat (Zeilenreihenfolge der Eingabe)"""
        self.write_table(pd.DataFrame({"fhat": np.asarray(fhat, dtype=float)}), filepath)

    def write_history(self, history: Sequence[HistoryRow], filepath: str,
                      label: Optional[str] = None):
        """Residuenverlauf mit Spalten [label,]iter,phase,residual"""
        self.write_table(history_table(history, label), filepath)

    def write_sweep(self, sweep: SweepTable, filepath: str):
        """Sweep-Tabelle mit Spalten alpha,R"""
        self.write_table(pd.DataFrame({"alpha": sweep.alpha, "R": sweep.R}), filepath)

    def write_shadow(self, model: RidgeModel, samples: LabeledSamples, filepath: str):
        """Shadow-Tabelle (siehe shadow_table)"""
        self.write_table(shadow_table(model, samples), filepath)

    def write_model(self, model: RidgeModel, filepath: str):
        """Modell im Format ridgekit-model-v1"""
        self.write_json(model.to_dict(), filepath)

    def write_spectrum(
        self,
        estimate: SpectrumEstimate,
        filepath: str,
        suggested_n: Optional[int],
        bootstrap: Optional[BootstrapSummary] = None,
        warning: Optional[str] = None,
    ):
        """
        Spektrum-Dokument {m, eigenvalues, eigenvectors, suggested_n, [warning], bootstrap}

        Eigenvektoren werden spaltenweise gespeichert (eine Liste pro Eigenvektor).
        """
        document = estimate.to_dict()
        document["suggested_n"] = suggested_n
        if warning is not None:
            document["warning"] = warning
        document["bootstrap"] = bootstrap.to_dict() if bootstrap is not None else None
        self.write_json(document, filepath)


def history_table(history: Sequence[HistoryRow], label: Optional[str] = None) -> pd.DataFrame:
    """Verlauf als DataFrame mit Spalten [label,]iter,phase,residual"""
    table = pd.DataFrame({
        "iter": [row.iteration for row in history],
        "phase": [row.phase for row in history],
        "residual": [row.residual for row in history],
    })
    if label is not None:
        table.insert(0, "label", label)
    return table
