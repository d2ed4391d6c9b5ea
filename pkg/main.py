"""
ridgekit - Hauptanwendung

Ridge-Approximation mit aktiven Unterräumen als Startwert
"""
import sys
from pathlib import Path

# Stelle sicher, dass src im Pfad ist
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
