"""sqlite ledger of benchmark runs and their metrics."""
import sqlite3, json, datetime
from typing import Dict, Any

from entropic.models.schema import BenchJob


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def get_conn(db_path: str):
    conn = sqlite3.connect(db_path)
    conn.row_factory = sqlite3.Row
    return conn


def init_db(db_path: str):
    conn = get_conn(db_path)
    cur = conn.cursor()
    cur.execute("CREATE TABLE IF NOT EXISTS run (id INTEGER PRIMARY KEY AUTOINCREMENT, method TEXT, m INTEGER, "
                "run_index INTEGER, seed INTEGER, ok INTEGER, started_at TEXT, finished_at TEXT, artifacts TEXT)")
    cur.execute("CREATE TABLE IF NOT EXISTS metric (id INTEGER PRIMARY KEY AUTOINCREMENT, run_id INTEGER, "
                "k TEXT, v REAL, ts TEXT)")
    conn.commit()
    conn.close()


def start_run(db_path: str, job: BenchJob) -> int:
    conn = get_conn(db_path)
    cur = conn.cursor()
    cur.execute("INSERT INTO run(method, m, run_index, seed, ok, started_at, finished_at, artifacts) "
                "VALUES(?,?,?,?,?,?,?,?)", (job.method, job.M, job.run, job.seed, None, _now(), None, "{}"))
    rid = cur.lastrowid
    conn.commit()
    conn.close()
    return rid


def finish_run(db_path: str, run_id: int, ok: bool, artifacts: Dict[str, Any] | None = None):
    conn = get_conn(db_path)
    conn.execute("UPDATE run SET ok=?, finished_at=?, artifacts=? WHERE id=?",
                 (1 if ok else 0, _now(), json.dumps(artifacts or {}), run_id))
    conn.commit()
    conn.close()


def add_metric(db_path: str, run_id: int, k: str, v: float):
    conn = get_conn(db_path)
    conn.execute("INSERT INTO metric(run_id, k, v, ts) VALUES(?,?,?,?)", (run_id, k, float(v), _now()))
    conn.commit()
    conn.close()


def metrics_for(db_path: str, run_id: int) -> Dict[str, float]:
    conn = get_conn(db_path)
    rows = conn.execute("SELECT k, v FROM metric WHERE run_id=? ORDER BY id", (run_id,)).fetchall()
    conn.close()
    return {row["k"]: row["v"] for row in rows}
