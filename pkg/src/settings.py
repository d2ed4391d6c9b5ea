"""
Settings und Konfiguration für ridgekit

Lädt Umgebungsvariablen aus der .env Datei im Projektverzeichnis. Die Werte
sind Standardwerte der CLI-Flags; Flags haben Vorrang.
"""
import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv


def _read_int(name: str, default: int, minimum: int = 1) -> int:
    """Liest eine Ganzzahl aus der Umgebung und prüft die Untergrenze"""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} muss eine Ganzzahl sein, erhalten: {raw!r}")
    if value < minimum:
        raise ValueError(f"{name} muss mindestens {minimum} sein, erhalten: {value}")
    return value


class Settings:
    """
    Zentrale Konfiguration der Anwendung

    Lädt Einstellungen aus .env Datei und stellt sie als Singleton zur Verfügung.
    """

    _instance: Optional['Settings'] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return

        # .env Datei laden (falls vorhanden)
        env_path = Path(__file__).parent.parent / '.env'
        load_dotenv(env_path)
        self.reload()

        self._initialized = True

    def reload(self):
        """
        Liest alle Werte erneut aus der Umgebung

        Raises:
            ValueError: bei ungültigen Werten (Name der Variable in der Meldung)
        """
        self.log_level: str = os.getenv('RIDGEKIT_LOG_LEVEL', 'WARNING').upper()

        # Active Subspace / Bootstrap
        self.bootstrap: int = _read_int('RIDGEKIT_BOOTSTRAP', 100)

        # Alternierende Minimierung
        self.iterations: int = _read_int('RIDGEKIT_ITERATIONS', 20, minimum=0)
        self.max_steps: int = _read_int('RIDGEKIT_MAX_STEPS', 10)

        # Quadratur-Orakel
        self.quad_outer: int = _read_int('RIDGEKIT_QUAD_OUTER', 201)
        inner = os.getenv('RIDGEKIT_QUAD_INNER')
        self.quad_inner: Optional[int] = (
            _read_int('RIDGEKIT_QUAD_INNER', self.quad_outer) if inner else None
        )
        self.sweep_angles: int = _read_int('RIDGEKIT_SWEEP_ANGLES', 101, minimum=2)

        # Threads für Bootstrap und Sweep
        self.workers: int = _read_int('RIDGEKIT_WORKERS', 1)

        if self.log_level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f"RIDGEKIT_LOG_LEVEL ungültig: {self.log_level}")

    @property
    def effective_quad_inner(self) -> int:
        """Innere Quadraturordnung (Standard: äußere Ordnung)"""
        return self.quad_inner if self.quad_inner is not None else self.quad_outer

    def as_dict(self) -> dict:
        """Gibt alle Einstellungen als Dictionary zurück"""
        return {
            'log_level': self.log_level,
            'bootstrap': self.bootstrap,
            'iterations': self.iterations,
            'max_steps': self.max_steps,
            'quad_outer': self.quad_outer,
            'quad_inner': self.effective_quad_inner,
            'sweep_angles': self.sweep_angles,
            'workers': self.workers,
        }


# Singleton-Instanz
settings = Settings()
