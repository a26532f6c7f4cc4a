import sys
import logging

from config import env_int
from experiment import FORMATS, ExperimentConfig, default_config, emit_table, run_sweep
from results_db import ResultsDB

logger = logging.getLogger(__name__)


def load_experiment_config(path) -> ExperimentConfig:
    """Carga la configuración del barrido; 'defaults' o None usan la rejilla por defecto"""
    if path is None or path == "defaults":
        return default_config()
    return ExperimentConfig.from_file(path)


class SweepCommand:
    """Subcomando sweep: ejecuta el barrido completo y escribe la tabla de métricas

    Flujo:
        1. Carga la configuración (archivo YAML o valores por defecto)
        2. Ejecuta todos los ensayos, en paralelo si se piden varios procesos
        3. Escribe filas y resumen en --out (o stdout)
        4. Opcionalmente guarda el barrido en la base de resultados
    """

    name = "sweep"

    def register(self, subparsers) -> None:
        """Declara el subcomando y sus opciones"""
        parser = subparsers.add_parser(self.name, help="Ejecuta el barrido de experimentos")
        parser.add_argument("--config", default="defaults",
                            help="Archivo YAML de configuración o 'defaults'")
        parser.add_argument("--out", help="Archivo de filas (el resumen va a *_summary); por defecto stdout")
        parser.add_argument("--summary-out", help="Destino del resumen cuando las filas van a stdout")
        parser.add_argument("--format", choices=FORMATS, default="csv")
        parser.add_argument("--workers", type=int, default=None,
                            help="Procesos en paralelo (por defecto MESHSIM_WORKERS o 1)")
        parser.add_argument("--db", help="Base SQLite donde guardar el barrido")

    def run(self, args) -> int:
        config = load_experiment_config(args.config)
        workers = args.workers if args.workers is not None else env_int("MESHSIM_WORKERS", 1)

        # La base debe abrirse antes de lanzar el barrido
        db = ResultsDB(args.db) if args.db else None

        table = run_sweep(config, workers=max(1, workers))
        emit_table(table, args.format, args.out or sys.stdout, summary_sink=args.summary_out)

        if db is not None:
            sweep_id = db.save_table(config, table)
            logger.info(f"Barrido guardado en {args.db} con id {sweep_id}")
        return 0
