import sqlite3
from typing import List, Dict, Optional, Any
from pathlib import Path
import uuid
import json
import logging
from datetime import datetime

from experiment import ExperimentConfig, ExperimentTable, TrialMetrics, aggregate
from errors import ResultsStoreError
from forwarding import Outcome, RouterKind

logger = logging.getLogger(__name__)


class ResultsDB:
    def __init__(self, db_path: str = "BD/results.db"):
        # Ruta al archivo de base de datos SQLite
        self.db_path = db_path
        try:
            Path(db_path).parent.mkdir(parents=True, exist_ok=True)
            self._init_db()  # Inicializa las tablas si no existen
        except (OSError, sqlite3.Error) as e:
            raise ResultsStoreError(f"No se pudo abrir la base de resultados {db_path}: {e}")

    def _init_db(self) -> None:
        """Inicializa la base de datos con las tablas necesarias"""
        with self._get_connection() as conn:
            # Un registro por barrido con su configuración completa
            conn.execute("""
                CREATE TABLE IF NOT EXISTS sweeps (
                    id TEXT PRIMARY KEY,
                    base_seed INTEGER NOT NULL,
                    config TEXT NOT NULL,
                    status TEXT NOT NULL,
                    created_at TEXT NOT NULL,
                    updated_at TEXT NOT NULL
                )
            """)

            # Filas de métricas de cada ensayo
            conn.execute("""
                CREATE TABLE IF NOT EXISTS trials (
                    sweep_id TEXT NOT NULL,
                    router TEXT NOT NULL,
                    n INTEGER NOT NULL,
                    rep INTEGER NOT NULL,
                    outcome TEXT NOT NULL,
                    hops INTEGER NOT NULL,
                    delay_ms REAL,
                    speed_mb_per_ms REAL,
                    PRIMARY KEY (sweep_id, router, n, rep),
                    FOREIGN KEY (sweep_id) REFERENCES sweeps(id)
                )
            """)

    def _get_connection(self) -> sqlite3.Connection:
        """Obtiene una conexión a la base de datos"""
        return sqlite3.connect(self.db_path)

    def save_table(self, config: ExperimentConfig, table: ExperimentTable) -> str:
        """Guarda un barrido completo y devuelve su identificador"""
        sweep_id = str(uuid.uuid4())
        now = datetime.now().isoformat()

        try:
            self._insert_sweep(sweep_id, now, config, table)
        except sqlite3.Error as e:
            raise ResultsStoreError(f"No se pudo guardar el barrido en {self.db_path}: {e}")

        logger.info(f"🗄️ Barrido {sweep_id} guardado con {len(table.rows)} filas")
        return sweep_id

    def _insert_sweep(self, sweep_id: str, now: str, config: ExperimentConfig, table: ExperimentTable) -> None:
        with self._get_connection() as conn:
            conn.execute(
                """
                INSERT INTO sweeps (id, base_seed, config, status, created_at, updated_at)
                VALUES (?, ?, ?, ?, ?, ?)
                """,
                (sweep_id, config.base_seed, json.dumps(config.to_dict()), 'Completado', now, now)
            )
            conn.executemany(
                """
                INSERT INTO trials (sweep_id, router, n, rep, outcome, hops, delay_ms, speed_mb_per_ms)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """,
                [(sweep_id, r.router.value, r.n, r.rep, r.outcome.value, r.hops, r.delay, r.speed)
                 for r in table.rows]
            )

    def load_table(self, sweep_id: str) -> Optional[ExperimentTable]:
        """Recupera la tabla de un barrido (None si no existe)"""
        if self.get_sweep(sweep_id) is None:
            return None

        with self._get_connection() as conn:
            cursor = conn.execute(
                """
                SELECT router, n, rep, outcome, hops, delay_ms, speed_mb_per_ms
                FROM trials WHERE sweep_id = ? ORDER BY router, n, rep
                """,
                (sweep_id,)
            )
            rows = [self._row_to_metrics(row) for row in cursor.fetchall()]

        return ExperimentTable(rows=rows, aggregates=aggregate(rows))

    def get_sweep(self, sweep_id: str) -> Optional[Dict]:
        """Obtiene los metadatos de un barrido"""
        with self._get_connection() as conn:
            cursor = conn.execute("SELECT * FROM sweeps WHERE id = ?", (sweep_id,))
            row = cursor.fetchone()

        return self._row_to_dict(row) if row else None

    def list_sweeps(self) -> List[Dict]:
        """Todos los barridos, del más reciente al más antiguo"""
        with self._get_connection() as conn:
            cursor = conn.execute("SELECT * FROM sweeps ORDER BY created_at DESC")
            return [self._row_to_dict(row) for row in cursor.fetchall()]

    def delete_sweep(self, sweep_id: str) -> None:
        """Elimina un barrido y sus filas"""
        with self._get_connection() as conn:
            conn.execute("DELETE FROM trials WHERE sweep_id = ?", (sweep_id,))
            conn.execute("DELETE FROM sweeps WHERE id = ?", (sweep_id,))

    def _row_to_dict(self, row: Any) -> Dict:
        """Convierte una fila de la tabla sweeps a un diccionario"""
        return {
            'id': row[0],
            'base_seed': row[1],
            'config': json.loads(row[2]),
            'status': row[3],
            'created_at': row[4],
            'updated_at': row[5]
        }

    def _row_to_metrics(self, row: Any) -> TrialMetrics:
        """Convierte una fila de la tabla trials en TrialMetrics"""
        return TrialMetrics(
            router=RouterKind(row[0]),
            n=row[1],
            rep=row[2],
            delay=row[5],
            speed=row[6],
            hops=row[4],
            outcome=Outcome(row[3])
        )

    def get_sweep_stats(self) -> Dict:
        """Obtiene estadísticas sobre los barridos almacenados"""
        stats = {}

        with self._get_connection() as conn:
            # Total de barridos
            cursor = conn.execute("SELECT COUNT(*) FROM sweeps")
            stats['total_sweeps'] = cursor.fetchone()[0]

            # Filas por resultado de ruta
            cursor = conn.execute("SELECT outcome, COUNT(*) FROM trials GROUP BY outcome")
            stats['trials_by_outcome'] = dict(cursor.fetchall())

        return stats
