"""
Logger Utility - Logging setup and the audit trail of simulator runs
"""

import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

load_dotenv(override=False)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
DEFAULT_LOG_LEVEL = os.getenv("NRSIM_LOG_LEVEL", "INFO")

logger = logging.getLogger("nr_simulator.audit")


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure root logging once for command-line runs

    Args:
        level: Level name; defaults to NRSIM_LOG_LEVEL or INFO
    """
    name = (level or DEFAULT_LOG_LEVEL).upper()
    numeric = getattr(logging, name, None)
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)


def audit_log_path() -> Optional[str]:
    """JSON-lines audit file named by NRSIM_AUDIT_LOG, if any"""
    path = os.getenv("NRSIM_AUDIT_LOG", "").strip()
    return path or None


def log_run_event(
    event: str,
    parameters: Dict[str, Any],
    execution_time_ms: int = 0,
    status: str = "success",
    result_summary: Optional[str] = None,
    error_message: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Log a subcommand run and append it to the audit file

    Args:
        event: Subcommand name (generate, xi, verify, ...)
        parameters: Parameters of the run
        execution_time_ms: Wall time in milliseconds
        status: 'success', 'rejected' or 'error'
        result_summary: Brief summary of results
        error_message: Error message if status is error

    Returns:
        The log entry
    """
    log_entry = {
        "timestamp": datetime.now().isoformat(),
        "event": event,
        "parameters": parameters,
        "execution_time_ms": execution_time_ms,
        "status": status,
        "result_summary": result_summary,
        "error_message": error_message,
    }

    if status == "error":
        logger.error(f"{event} failed after {execution_time_ms}ms: {error_message}")
    else:
        logger.info(f"{event} {status} in {execution_time_ms}ms" + (f": {result_summary}" if result_summary else ""))

    path = audit_log_path()
    if path:
        try:
            os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(log_entry, default=str) + "\n")
        except OSError as e:
            logger.warning(f"Failed to write audit log {path}: {e}")

    return log_entry


def get_recent_logs(
    limit: int = 50,
    event: Optional[str] = None,
    status: Optional[str] = None,
) -> List[Dict[str, Any]]:
    """
    Read the newest audit entries

    Args:
        limit: Maximum number of entries to return
        event: Filter by event name
        status: Filter by status

    Returns:
        Entries, newest first
    """
    path = audit_log_path()
    if not path or not os.path.exists(path):
        return []

    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                logger.warning(f"Skipping malformed audit line in {path}")
                continue
            if event and entry.get("event") != event:
                continue
            if status and entry.get("status") != status:
                continue
            entries.append(entry)

    return list(reversed(entries))[:limit]
