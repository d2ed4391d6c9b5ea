"""
Kommandozeile für ridgekit

Unterbefehle:
    sample      Latin-Hypercube- oder Gauß-Design als CSV
    evaluate    eingebaute Testfunktion auf einem Design auswerten (f und Gradienten)
    subspace    Spektrum von Ĉ aus Gradienten, Dimension n, Bootstrap
    fit         alternierende Minimierung, Modell-JSON und Residuenverlauf
    predict     Vorhersagen eines Modells
    testerror   mittlerer relativer Fehler auf Testdaten
    shadow      Tabelle für Shadow-Plots (n ≤ 2)
    sweep       R(α) der bivariaten Funktion
    checkbound  numerische Prüfung der Gradientenschranke
    compare     Startwertvergleich (active, identity, random)

Exit-Codes: 0 Erfolg, 1 ungültige Argumente, 2 Ein-/Ausgabe, 3 Parsefehler,
4 fehlende Eingabe, 5 Dimensionskonflikt, 6 nicht unterstützt.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from src.activesubspace import (
    SubspaceError,
    bootstrap_spectrum,
    choose_n,
    estimate_C,
)
from src.csv_exporter import CsvExporter, CsvExportError
from src.csv_importer import CsvImporter, CsvImportError, load_model, load_spectrum
from src.experiments import INIT_MODES, compare_initializations, initial_frame
from src.oracle import OracleError, builtin, check_bound, sweep_angle
from src.polyridge import LabeledSamples, alternate_fit, predict, test_error
from src.sampling import gaussian_design, latin_hypercube, scale_to_box
from src.settings import settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_MISSING_INPUT = 4
EXIT_DIMENSION = 5
EXIT_UNSUPPORTED = 6

CHECKBOUND_MAX_DIM = 3


class CliError(Exception):
    """Fehler mit zugehörigem Exit-Code"""

    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser, der bei ungültigen Argumenten CliError wirft"""

    def error(self, message):
        raise CliError(message, EXIT_USAGE)


@dataclass
class RunConfig:
    """
    Parameter eines CLI-Aufrufs

    Fehlende Zahlenwerte werden aus den Settings ergänzt (Flags haben Vorrang).
    """
    command: str
    samples: Optional[str] = None
    grads: Optional[str] = None
    model: Optional[str] = None
    spectrum: Optional[str] = None
    out: Optional[str] = None
    history: Optional[str] = None
    design: str = "lhs"
    count: int = 100
    m: int = 2
    box: Optional[tuple[float, float]] = None
    n: int = 1
    N: int = 2
    P: int = 20
    max_steps: int = 10
    init: str = "active"
    seed: int = 0
    B: int = 100
    random_inits: int = 10
    angles: int = 101
    quad_outer: int = 201
    quad_inner: Optional[int] = None
    workers: int = 1
    function: str = "bivariate"
    params: dict = field(default_factory=dict)
    lipschitz: Optional[float] = None

    def __post_init__(self):
        """Validierung"""
        positive = {
            "count": self.count, "m": self.m, "n": self.n, "N": self.N,
            "max_steps": self.max_steps, "B": self.B, "random_inits": self.random_inits,
            "quad_outer": self.quad_outer, "workers": self.workers,
        }
        for name, value in positive.items():
            if value < 1:
                raise CliError(f"{name} muss positiv sein, erhalten: {value}")
        if self.P < 0:
            raise CliError(f"iters muss ≥ 0 sein, erhalten: {self.P}")
        if self.angles < 2:
            raise CliError("angles muss mindestens 2 sein")
        if self.quad_inner is not None and self.quad_inner < 1:
            raise CliError("quad-inner muss positiv sein")
        if self.init not in INIT_MODES:
            raise CliError(f"init muss einer von {', '.join(INIT_MODES)} sein")
        if self.design not in ("lhs", "gaussian"):
            raise CliError("design muss lhs oder gaussian sein")
        if self.box is not None and self.box[0] >= self.box[1]:
            raise CliError("box: untere Grenze muss kleiner als obere Grenze sein")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Erstellt RunConfig aus geparsten Argumenten und Settings"""

        def pick(name: str, default):
            value = getattr(args, name, None)
            return default if value is None else value

        return cls(
            command=args.command,
            samples=pick("samples", None),
            grads=pick("grads", None),
            model=pick("model", None),
            spectrum=pick("spectrum", None),
            out=pick("out", None),
            history=pick("history", None),
            design=pick("design", "lhs"),
            count=pick("count", 100),
            m=pick("m", 2),
            box=tuple(args.box) if getattr(args, "box", None) else None,
            n=pick("dim", 1),
            N=pick("degree", 2),
            P=pick("iters", settings.iterations),
            max_steps=pick("max_steps", settings.max_steps),
            init=pick("init", "active"),
            seed=pick("seed", 0),
            B=pick("bootstrap", settings.bootstrap),
            random_inits=pick("random_inits", 10),
            angles=pick("angles", settings.sweep_angles),
            quad_outer=pick("quad_outer", settings.quad_outer),
            quad_inner=pick("quad_inner", settings.quad_inner),
            workers=pick("workers", settings.workers),
            function=pick("function", "bivariate"),
            params=_parse_params(getattr(args, "param", None) or []),
            lipschitz=pick("lipschitz", None),
        )


def _parse_params(items: Sequence[str]) -> dict:
    """key=value-Paare; Werte werden als JSON gelesen, sonst als Text übernommen"""
    params = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise CliError(f"Parameter muss die Form key=value haben: {item}")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise CliError(f"{flag} fehlt")
    return value


def _emit(document: dict, out: Optional[str]):
    """JSON-Bericht auf stdout und optional in eine Datei"""
    print(json.dumps(document))
    if out:
        CsvExporter().write_json(document, out)


def cmd_sample(config: RunConfig) -> int:
    """Design erzeugen und als CSV mit Spalten x1…xm schreiben"""
    out = _require(config.out, "--out")
    if config.design == "lhs":
        design = latin_hypercube(config.count, config.m, config.seed)
        if config.box is not None:
            design = scale_to_box(design, *config.box)
    else:
        if config.box is not None:
            raise CliError("--box ist nur für lhs zulässig")
        design = gaussian_design(config.count, config.m, config.seed)
    CsvExporter().write_design(design, out)
    logger.info("%d Punkte in %d Dimensionen nach %s geschrieben", design.M, design.m, out)
    return EXIT_OK


def cmd_evaluate(config: RunConfig) -> int:
    """Testfunktion auf einem Design auswerten (Spalte f, optional Gradienten)"""
    X = CsvImporter(_require(config.samples, "--samples")).read_inputs()
    f = builtin(config.function, **config.params)
    if X.shape[1] != f.dim:
        raise CliError(f"Design hat {X.shape[1]} Spalten, {f.name} erwartet {f.dim}",
                       EXIT_DIMENSION)
    exporter = CsvExporter()
    exporter.write_samples(LabeledSamples(X=X, f=f(X)), _require(config.out, "--out"))
    if config.grads:
        exporter.write_gradients(f.grad(X), config.grads)
    return EXIT_OK


def cmd_subspace(config: RunConfig) -> int:
    """Spektrum, vorgeschlagenes n und Bootstrap-Zusammenfassung als JSON"""
    G = CsvImporter(_require(config.grads, "--grads")).read_gradients()
    estimate = estimate_C(G)
    warning = None
    try:
        suggested_n: Optional[int] = choose_n(estimate.spectrum)
    except SubspaceError as e:
        suggested_n = None
        warning = str(e)
        logger.warning("%s", warning)
    summary = bootstrap_spectrum(G, B=config.B, seed=config.seed, workers=config.workers)
    CsvExporter().write_spectrum(estimate, _require(config.out, "--out"), suggested_n,
                                 summary, warning)
    return EXIT_OK


def _history_path(config: RunConfig) -> str:
    if config.history:
        return config.history
    out = Path(_require(config.out, "--out"))
    return str(out.with_name(out.stem + ".history.csv"))


def cmd_fit(config: RunConfig) -> int:
    """Alternierende Minimierung; Modell-JSON und Verlauf iter,phase,residual"""
    samples = CsvImporter(_require(config.samples, "--samples")).read_samples()
    if config.n >= samples.m:
        raise CliError(f"dim muss kleiner als m = {samples.m} sein", EXIT_DIMENSION)

    estimate = None
    if config.init == "active":
        if not config.spectrum or not Path(config.spectrum).exists():
            raise CliError("init active benötigt --spectrum", EXIT_MISSING_INPUT)
        estimate = load_spectrum(config.spectrum)
        if estimate.m != samples.m:
            raise CliError(f"Spektrum hat Dimension {estimate.m}, Daten haben {samples.m}",
                           EXIT_DIMENSION)
    seed = config.seed if config.init == "random" else None
    U0 = initial_frame(config.init, samples.m, config.n, estimate, seed)

    model = alternate_fit(samples, config.n, config.N, U0, P=config.P,
                          max_steps=config.max_steps, init=config.init, seed=seed)
    exporter = CsvExporter()
    exporter.write_model(model, _require(config.out, "--out"))
    exporter.write_history(model.history, _history_path(config))
    logger.info("Finales Residuum %.6e", model.residual_final)
    return EXIT_OK


def _load_model_for(config: RunConfig, m: int):
    model = load_model(_require(config.model, "--model"))
    if model.m != m:
        raise CliError(f"Modell erwartet m = {model.m}, Daten haben {m}", EXIT_DIMENSION)
    return model


def cmd_predict(config: RunConfig) -> int:
    """Vorhersagen in Spalte fhat (Zeilenreihenfolge der Eingabe)"""
    X = CsvImporter(_require(config.samples, "--samples")).read_inputs()
    model = _load_model_for(config, X.shape[1])
    CsvExporter().write_predictions(predict(model, X), _require(config.out, "--out"))
    return EXIT_OK


def cmd_testerror(config: RunConfig) -> int:
    """Bericht {"mean_relative_error": v}"""
    samples = CsvImporter(_require(config.samples, "--samples")).read_samples()
    model = _load_model_for(config, samples.m)
    _emit({"mean_relative_error": test_error(model, samples)}, config.out)
    return EXIT_OK


def cmd_shadow(config: RunConfig) -> int:
    """Shadow-Tabelle für n ∈ {1, 2}"""
    samples = CsvImporter(_require(config.samples, "--samples")).read_samples()
    model = _load_model_for(config, samples.m)
    if model.n > 2:
        raise CliError("shadow plots require n ≤ 2", EXIT_UNSUPPORTED)
    CsvExporter().write_shadow(model, samples, _require(config.out, "--out"))
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    """R(α) für die bivariate Funktion, Spalten alpha,R"""
    table = sweep_angle(builtin("bivariate"), config.angles, config.quad_outer,
                        config.quad_inner, workers=config.workers)
    CsvExporter().write_sweep(table, _require(config.out, "--out"))
    return EXIT_OK


def cmd_checkbound(config: RunConfig) -> int:
    """JSON-Bericht: FD-Gradientnorm bei W₂, Schranke, ok"""
    f = builtin(config.function, **config.params)
    if f.dim > CHECKBOUND_MAX_DIM:
        raise CliError(f"checkbound requires m ≤ {CHECKBOUND_MAX_DIM}, erhalten m = {f.dim}",
                       EXIT_UNSUPPORTED)
    if config.n >= f.dim:
        raise CliError(f"dim muss kleiner als m = {f.dim} sein", EXIT_DIMENSION)
    report = check_bound(f, config.n, config.quad_outer, config.quad_inner,
                         lipschitz=config.lipschitz)
    _emit(report.to_dict(), config.out)
    return EXIT_OK


def cmd_compare(config: RunConfig) -> int:
    """Verläufe label,iter,phase,residual für alle Startwerte"""
    samples = CsvImporter(_require(config.samples, "--samples")).read_samples()
    if config.n >= samples.m:
        raise CliError(f"dim muss kleiner als m = {samples.m} sein", EXIT_DIMENSION)
    estimate = load_spectrum(config.spectrum) if config.spectrum else None
    if estimate is not None and estimate.m != samples.m:
        raise CliError(f"Spektrum hat Dimension {estimate.m}, Daten haben {samples.m}",
                       EXIT_DIMENSION)
    comparison = compare_initializations(
        samples, config.n, config.N, estimate,
        random_seeds=range(config.seed, config.seed + config.random_inits),
        P=config.P, max_steps=config.max_steps,
    )
    CsvExporter().write_table(comparison.to_table(), _require(config.out, "--out"))
    for label, value in comparison.final_residuals().items():
        logger.info("%s: %.6e", label, value)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "evaluate": cmd_evaluate,
    "subspace": cmd_subspace,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "testerror": cmd_testerror,
    "shadow": cmd_shadow,
    "sweep": cmd_sweep,
    "checkbound": cmd_checkbound,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    """Argumentparser mit allen Unterbefehlen"""
    parser = _ArgumentParser(prog="ridgekit", description="Ridge-Approximation mit aktiven Unterräumen")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Log-Level (Standard: RIDGEKIT_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="Ausgabedatei")
        return p

    p = command("sample", "Design erzeugen")
    p.add_argument("--design", choices=["lhs", "gaussian"], default="lhs")
    p.add_argument("--count", type=int, required=True, help="Anzahl Punkte M")
    p.add_argument("--m", type=int, required=True, help="Dimension m")
    p.add_argument("--box", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)

    p = command("evaluate", "Testfunktion auswerten")
    p.add_argument("--samples", required=True)
    p.add_argument("--grads")
    p.add_argument("--function", default="bivariate")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")

    p = command("subspace", "Spektrum aus Gradienten")
    p.add_argument("--grads", required=True)
    p.add_argument("--bootstrap", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)

    for name, help_text in (("fit", "Ridge-Approximation anpassen"),
                            ("compare", "Startwerte vergleichen")):
        p = command(name, help_text)
        p.add_argument("--samples", required=True)
        p.add_argument("--dim", type=int, required=True, help="Anzahl Ridge-Richtungen n")
        p.add_argument("--degree", type=int, required=True, help="Polynomgrad N")
        p.add_argument("--iters", type=int, help="Iterationen P")
        p.add_argument("--max-steps", type=int)
        p.add_argument("--spectrum")
        p.add_argument("--seed", type=int, default=0)
        if name == "fit":
            p.add_argument("--init", choices=list(INIT_MODES), default="active")
            p.add_argument("--history")
        else:
            p.add_argument("--random-inits", type=int, default=10)

    for name, help_text in (("predict", "Vorhersagen"), ("testerror", "Testfehler"),
                            ("shadow", "Shadow-Tabelle")):
        p = command(name, help_text)
        p.add_argument("--model", required=True)
        p.add_argument("--samples", required=True)

    p = command("sweep", "Winkel-Sweep der bivariaten Funktion")
    p.add_argument("--angles", type=int)
    p.add_argument("--quad-outer", type=int)
    p.add_argument("--quad-inner", type=int)
    p.add_argument("--workers", type=int)

    p = command("checkbound", "Gradientenschranke prüfen")
    p.add_argument("--function", default="bivariate")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--quad-outer", type=int)
    p.add_argument("--quad-inner", type=int)
    p.add_argument("--lipschitz", type=float)
    return parser


def _exit_code(error: Exception) -> int:
    """Ordnet Ausnahmen den Exit-Codes zu"""
    if isinstance(error, CliError):
        return error.code
    if isinstance(error, CsvImportError):
        return EXIT_PARSE
    if isinstance(error, (FileNotFoundError, CsvExportError, OSError)):
        return EXIT_IO
    if isinstance(error, OracleError) and "tensor quadrature infeasible" in str(error):
        return EXIT_UNSUPPORTED
    return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Führt einen CLI-Aufruf aus

    Returns:
        Exit-Code
    """
    try:
        args = build_parser().parse_args(argv)
        level = args.log_level or settings.log_level
        logging.basicConfig(level=getattr(logging, level),
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        logging.getLogger().setLevel(getattr(logging, level))
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except (CliError, CsvImportError, CsvExportError, OSError, ValueError) as e:
        code = _exit_code(e)
        print(f"Fehler: {e}", file=sys.stderr)
        return code

