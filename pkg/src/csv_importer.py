"""
CSV- und JSON-Import für Stichproben, Gradienten, Modelle und Spektren

Formate:
- Stichproben: Header x1,…,xm[,f]
- Gradienten: Header g1,…,gm
- Modell: JSON im Format ridgekit-model-v1
- Spektrum: JSON mit eigenvalues / eigenvectors (spaltenweise)
"""
import json
import re
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from src.activesubspace import GradientSet, SpectrumEstimate
from src.polyridge import LabeledSamples, RidgeModel


class CsvImportError(Exception):
    """Fehler beim Einlesen (line = 1-basierte Dateizeile, falls bekannt)"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"Zeile {line}: {message}")
        self.line = line


class CsvImporter:
    """
    Liest numerische CSV-Dateien mit Kopfzeile
    """

    def __init__(self, filepath: str):
        """
        Initialisiert den Importer

        Args:
            filepath: Pfad zur CSV-Datei
        """
        self.filepath = Path(filepath)

        if not self.filepath.suffix.lower() in ['.csv', '.txt']:
            raise ValueError(f"Ungültiges Dateiformat: {self.filepath.suffix}")

        if not self.filepath.exists():
            raise FileNotFoundError(f"Datei nicht gefunden: {filepath}")

    def read_table(self) -> pd.DataFrame:
        """
        Liest die Datei als Float-Tabelle

        Raises:
            CsvImportError: bei Strukturfehlern oder nicht-numerischen Zellen
        """
        try:
            raw = pd.read_csv(self.filepath, dtype=str, keep_default_na=False,
                              skipinitialspace=True)
        except pd.errors.EmptyDataError:
            raise CsvImportError("Datei ist leer", line=1)
        except pd.errors.ParserError as e:
            match = re.search(r"line (\d+)", str(e))
            raise CsvImportError(f"Ungültige Struktur: {e}",
                                 line=int(match.group(1)) if match else None)

        if raw.empty:
            raise CsvImportError("Keine Datenzeilen gefunden", line=2)

        table = raw.apply(pd.to_numeric, errors="coerce")
        invalid = table.isna().any(axis=1) | ~np.isfinite(table.to_numpy(dtype=float)).all(axis=1)
        if invalid.any():
            row_idx = int(np.flatnonzero(invalid.to_numpy())[0])
            # Zeile 1 ist der Header
            raise CsvImportError(
                f"Nicht-numerischer Wert: {raw.iloc[row_idx].tolist()}",
                line=row_idx + 2,
            )
        return table.astype(float)

    def _columns(self, table: pd.DataFrame, prefix: str) -> list[str]:
        """Spalten prefix1…prefixm in numerischer Reihenfolge"""
        cols = [c for c in table.columns if re.fullmatch(rf"{prefix}\d+", c)]
        cols.sort(key=lambda c: int(c[len(prefix):]))
        expected = [f"{prefix}{j}" for j in range(1, len(cols) + 1)]
        if not cols or cols != expected:
            raise CsvImportError(f"Header muss {prefix}1,…,{prefix}m enthalten", line=1)
        return cols

    def read_inputs(self) -> np.ndarray:
        """Eingaben x1…xm als M×m-Matrix"""
        table = self.read_table()
        return table[self._columns(table, "x")].to_numpy()

    def read_samples(self) -> LabeledSamples:
        """
        Stichproben mit Ausgabespalte f

        Raises:
            CsvImportError: wenn die Spalte f fehlt
        """
        table = self.read_table()
        if "f" not in table.columns:
            raise CsvImportError("Spalte f fehlt", line=1)
        X = table[self._columns(table, "x")].to_numpy()
        return LabeledSamples(X=X, f=table["f"].to_numpy())

    def read_gradients(self) -> GradientSet:
        """Gradienten g1…gm"""
        table = self.read_table()
        return GradientSet(table[self._columns(table, "g")].to_numpy())


def _load_json(filepath: str) -> dict:
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"Datei nicht gefunden: {filepath}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise CsvImportError(f"Ungültiges JSON: {e.msg}", line=e.lineno)


def load_model(filepath: str) -> RidgeModel:
    """
    Lädt ein Modell (ridgekit-model-v1)

    Raises:
        CsvImportError: bei fehlenden Schlüsseln oder falscher Version
    """
    data = _load_json(filepath)
    try:
        return RidgeModel.from_dict(data)
    except (KeyError, ValueError, TypeError) as e:
        raise CsvImportError(f"Ungültiges Modell: {e}")


def load_spectrum(filepath: str) -> SpectrumEstimate:
    """
    Lädt ein Spektrum-Dokument

    Raises:
        CsvImportError: bei fehlenden Schlüsseln oder inkonsistenten Daten
    """
    data = _load_json(filepath)
    try:
        return SpectrumEstimate.from_dict(data)
    except (KeyError, ValueError, TypeError) as e:
        raise CsvImportError(f"Ungültiges Spektrum: {e}")
