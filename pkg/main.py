#!/usr/bin/env python3
# main.py

"""
Punto de entrada principal del toolkit tactile-cs.

Este script maneja:
- Parseo de argumentos de línea de comandos (un subcomando por job).
- Configuración del entorno (dev vs. prod) para rutas de config y logs.
- Configuración global del logging.
- Configuración de un log de éxito separado.
- Ejecución del job pedido y mapeo de errores a códigos de salida.

Códigos de salida: 0 éxito, 1 error de validación o de uso, 2 error de E/S
o de formato de archivo.
"""

from __future__ import annotations

# Importaciones de la Biblioteca Estándar
import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

# Importaciones Locales
from src.config_loader import Config
from src.errors import FormatError, TactileCsError
from src.jobs import (
    GenerateRecordingJob,
    MeasureRecordingJob,
    ReconstructRecordingJob,
    SparsitySeriesJob,
    SweepExperimentJob,
    WiringReportJob,
)

# Variables Globales de Entorno
CONFIG_DIR = Path(__file__).parent / "config"
ENV_NAME = "dev"
LOG_FILE_PATH = Path(__file__).parent / "data/tactile_cs.log"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def setup_logging(level: int = logging.INFO, log_file: str | Path = "data/tactile_cs.log"):
    """
    Configura el logging global (principal) para la consola y un archivo.
    """
    log_file = Path(log_file)
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    except PermissionError:
        print(f"[ERROR] No se pudo crear/escribir en {log_file}. "
              f"Verifica permisos o la ruta de log para el entorno '{ENV_NAME}'. "
              "Continuando con logs solo en consola.", file=sys.stderr)

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )


def setup_success_logger(log_dir: Path) -> logging.Logger:
    """
    Configura un logger simple separado SOLO para los éxitos.
    Guardará en 'data/jobs_success.log' (o el log_dir de prod).
    """
    log_file = log_dir / "jobs_success.log"

    logger = logging.getLogger("JobSuccessLog")
    logger.setLevel(logging.INFO)

    # No propagar al logger root
    logger.propagate = False

    formatter = logging.Formatter('%(message)s')

    # Limpiar handlers viejos si se reconfigura
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(log_file, encoding='utf-8', mode='a')
        fh.setFormatter(formatter)
        logger.addHandler(fh)
    except OSError as e:
        print(f"[ERROR] No se pudo crear el log de éxito {log_file}: {e}", file=sys.stderr)
        logger.addHandler(logging.NullHandler())

    return logger


# ---------------------------
# Runners de Jobs
# ---------------------------

def run_generate(args: argparse.Namespace) -> Optional[Path]:
    """Genera una grabación sintética."""
    job = GenerateRecordingJob(
        CONFIG_DIR, args.spec, args.out, env_name=ENV_NAME,
        smooth_width=args.smooth, noise_seed=args.noise_seed, csv_out=args.csv,
    )
    return job.run()


def run_measure(args: argparse.Namespace) -> Optional[Path]:
    """Comprime una grabación con Φ_H."""
    job = MeasureRecordingJob(
        CONFIG_DIR, args.rec, args.m, args.block, args.seed, args.out, env_name=ENV_NAME,
    )
    return job.run()


def run_reconstruct(args: argparse.Namespace) -> Optional[Path]:
    """Reconstruye una grabación desde sus mediciones."""
    job = ReconstructRecordingJob(
        CONFIG_DIR, args.meas, args.m, args.block, args.seed, args.out, env_name=ENV_NAME,
        iterations=args.iters, lam=args.lam, trace=args.trace, report=args.report,
    )
    return job.run()


def run_sweep(args: argparse.Namespace) -> Optional[Path]:
    """Corre el barrido de PSNR."""
    job = SweepExperimentJob(CONFIG_DIR, args.config, args.out_dir, env_name=ENV_NAME, jobs=args.jobs)
    return job.run()


def run_sparsity(args: argparse.Namespace) -> Optional[Path]:
    """Serie de nnz en D2 o D4."""
    job = SparsitySeriesJob(
        CONFIG_DIR, args.rec, args.basis, args.out, env_name=ENV_NAME, abs_tol=args.abs_tol,
    )
    return job.run()


def run_wiring_report(args: argparse.Namespace) -> Optional[Path]:
    """Reporte de cableado del operador."""
    job = WiringReportJob(CONFIG_DIR, args.n, args.m, args.block, args.seed, args.out, env_name=ENV_NAME)
    return job.run()


# Mapeo de subcomandos a funciones runner
RUNNERS: Dict[str, Callable[[argparse.Namespace], Optional[Path]]] = {
    "generate": run_generate,
    "measure": run_measure,
    "reconstruct": run_reconstruct,
    "sweep": run_sweep,
    "sparsity": run_sparsity,
    "wiring-report": run_wiring_report,
}

# ---------------------------
# Interfaz de Línea de Comandos (CLI)
# ---------------------------


class CliParser(argparse.ArgumentParser):
    """ArgumentParser que sale con código 1 ante errores de uso."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _operator_flags(parser: argparse.ArgumentParser, defaults: Config, with_n: bool = False) -> None:
    if with_n:
        parser.add_argument("--n", type=int, required=True, help="Cantidad de taxels N.")
    parser.add_argument("--m", type=int, required=True, help="Cantidad de mediciones M.")
    parser.add_argument(
        "--block", type=int, default=defaults.get_int("measure.block_size", 32),
        help="Tamaño de bloque de Hadamard B (potencia de 2). Default: measure.block_size",
    )
    parser.add_argument(
        "--seed", type=int, default=defaults.get_int("measure.seed", 0),
        help="Semilla de P_N y Q_M. Default: measure.seed",
    )


def build_parser(defaults: Config) -> argparse.ArgumentParser:
    """Arma el parser con un subparser por job. `defaults` aporta los valores de settings.yaml."""
    parser = CliParser(
        prog="tactile-cs",
        allow_abbrev=False,
        description="tactile-cs: compressed sensing para arreglos de sensores táctiles.",
    )
    parser.add_argument(
        "--env",
        default="dev",
        choices=["dev", "prod"],
        help="Entorno a usar (dev o prod). Afecta rutas de config y logs. Default: dev"
    )
    parser.add_argument(
        "--config-dir",
        default=None,
        help="Directorio de configuración alternativo (settings.yaml y .env)."
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Habilita logging detallado (DEBUG level)."
    )
    sub = parser.add_subparsers(dest="command", metavar="<subcomando>")
    sub.required = True

    p = sub.add_parser("generate", help="Escenario sintético -> grabación.")
    p.add_argument("--spec", required=True, help="YAML con el escenario.")
    p.add_argument("--out", required=True, help="Grabación de salida (TXCS).")
    p.add_argument(
        "--smooth", type=int, default=1,
        help="Ancho de la media móvil causal (1 = sin filtrar). Default: 1",
    )
    p.add_argument("--noise-seed", type=int, default=None, help="Si se indica, aplica el modelo de ruido.")
    p.add_argument("--csv", default=None, help="Además exporta la grabación como CSV (t, i0..iN-1).")

    p = sub.add_parser("measure", help="Grabación -> vectores de medición.")
    p.add_argument("--rec", required=True, help="Grabación de entrada (TXCS).")
    _operator_flags(p, defaults)
    p.add_argument("--out", required=True, help="Mediciones de salida (TXCS, record type 2).")

    p = sub.add_parser("reconstruct", help="Mediciones -> grabación reconstruida (FISTA + warm start).")
    p.add_argument("--meas", required=True, help="Mediciones de entrada.")
    _operator_flags(p, defaults)
    p.add_argument("--iters", type=int, default=None, help="Iteraciones de FISTA. Default: solver.max_iters")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Peso λ. Default: solver.lambda")
    p.add_argument("--out", required=True, help="Grabación reconstruida (TXCS).")
    p.add_argument("--trace", default=None, help="CSV con la traza del objetivo.")
    p.add_argument("--report", default=None, help="CSV con residuo y tiempo por time-step.")

    p = sub.add_parser("sweep", help="Barrido de PSNR sobre M e iteraciones.")
    p.add_argument("--config", required=True, help="YAML del experimento (version: 1).")
    p.add_argument("--out-dir", required=True, help="Directorio de salida.")
    p.add_argument("--jobs", type=int, default=None, help="Workers del barrido. Default: sweep.jobs")

    p = sub.add_parser("sparsity", help="Serie temporal de nnz en una base wavelet.")
    p.add_argument("--rec", required=True, help="Grabación de entrada (TXCS).")
    p.add_argument("--basis", required=True, choices=["d2", "d4"], help="Base wavelet.")
    p.add_argument("--out", required=True, help="CSV de salida (t, nnz).")
    p.add_argument("--abs-tol", type=float, default=None, help="Umbral de nnz. Default: sparsity.abs_tol")

    p = sub.add_parser("wiring-report", help="Cadenas de taxels en serie por bloque.")
    _operator_flags(p, defaults, with_n=True)
    p.add_argument("--out", required=True, help="CSV de salida.")

    return parser


def _prescan(argv: Sequence[str]) -> argparse.Namespace:
    """Lee solo --env y --config-dir para saber de dónde tomar los defaults."""
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--env", default="dev")
    pre.add_argument("--config-dir", default=None)
    known, _ = pre.parse_known_args(argv)
    return known


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Función principal:
    1. Configura globales (ENV_NAME, CONFIG_DIR, LOG_FILE_PATH).
    2. Parsea args con los defaults del entorno.
    3. Configura logging (principal y de éxito).
    4. Ejecuta el job pedido.
    5. Imprime resumen y retorna código de salida.
    """
    global CONFIG_DIR, ENV_NAME, LOG_FILE_PATH

    argv = list(sys.argv[1:] if argv is None else argv)

    # 1. Configurar Entorno
    pre = _prescan(argv)
    ENV_NAME = pre.env if pre.env in ("dev", "prod") else "dev"
    if ENV_NAME == "prod":
        CONFIG_DIR = Path("/etc/tactile-cs")
        LOG_FILE_PATH = Path("/var/log/tactile-cs/tactile_cs.log")
    else:
        CONFIG_DIR = Path(__file__).parent / "config"
        LOG_FILE_PATH = Path(__file__).parent / "data/tactile_cs.log"
    if pre.config_dir:
        CONFIG_DIR = Path(pre.config_dir)

    defaults = Config(CONFIG_DIR, env_name=ENV_NAME)
    try:
        args = build_parser(defaults).parse_args(argv)
    except SystemExit as e:
        # --help sale con 0, los errores de uso con 1 (CliParser.error)
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION

    # 2. Configurar Logging
    level_name = "DEBUG" if args.verbose else str(defaults.get("general.log_level", "INFO")).upper()
    setup_logging(level=getattr(logging, level_name, logging.INFO), log_file=LOG_FILE_PATH)
    success_logger = setup_success_logger(LOG_FILE_PATH.parent)

    logger = logging.getLogger("main")
    logger.info(f"Iniciando tactile-cs {args.command}. Entorno: {ENV_NAME.upper()}")

    # 3. Ejecutar Job
    try:
        path = RUNNERS[args.command](args)
    except (FormatError, OSError) as e:
        logger.error(f"[{args.command}] Error de E/S: {e}")
        print(f"[{args.command.upper()}][ERROR] {e}", file=sys.stderr)
        return EXIT_IO
    except (TactileCsError, ValueError) as e:
        logger.error(f"[{args.command}] Error de validación: {e}")
        print(f"[{args.command.upper()}][ERROR] {e}", file=sys.stderr)
        return EXIT_VALIDATION

    # 4. Resumen Final
    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    success_logger.info(f"{timestamp} - {args.command} - ejecutado con éxito.")
    logger.info(f"=== RESUMEN === Ok. {args.command}: {path}")
    print(f"[{args.command}] Salida: {path}")
    return EXIT_OK


# Punto de Entrada
if __name__ == "__main__":
    sys.exit(main())
