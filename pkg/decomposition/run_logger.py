"""
Run Logger - Utility for saving command arguments, solver summaries and
errors as one JSON file per command run.
"""
import json
import logging
import os
from typing import Any, Dict, Optional

from django.conf import settings
from django.utils import timezone

from .tensor_io import to_jsonable

logger = logging.getLogger(__name__)

_PLAIN = (str, int, float, bool, list, tuple, type(None))


class RunLogger:
    """Logger for one management command run"""

    def __init__(self, command: str, options: Dict[str, Any], log_dir: Optional[str] = None):
        """Initialize logger; an empty log_dir (the default setting) disables saving"""
        self.log_dir = log_dir if log_dir is not None else settings.VBI_RUN_LOG_DIR
        self.logs = {
            "command": command,
            "timestamp": timezone.now().isoformat(),
            "options": {k: to_jsonable(v) for k, v in options.items() if isinstance(v, _PLAIN)},
            "solves": [],
            "errors": [],
        }

        timestamp = timezone.now().strftime("%Y%m%d_%H%M%S_%f")
        self.log_filename = f"run_{command}_{timestamp}.json"

    @property
    def enabled(self) -> bool:
        return bool(self.log_dir)

    def log_solve(self, label: str, result, extra: Optional[Dict[str, Any]] = None):
        """Log a SolverResult: iterations, final theta and the last trace record"""
        state = result.state
        entry = {
            "label": label,
            "iters": state.iter,
            "converged": state.converged,
            "theta": list(state.e_theta),
            "tubal_rank": state.l_factors.r,
            "trace_length": len(result.trace),
            "last_record": result.trace[-1].as_row() if result.trace else None,
        }
        if extra:
            entry.update(extra)
        self.logs["solves"].append(to_jsonable(entry))

    def log_error(self, exc: Exception):
        self.logs["errors"].append({"type": type(exc).__name__, "message": str(exc)})

    def save(self) -> Optional[str]:
        """Save the logs to a JSON file"""
        if not self.enabled:
            return None
        try:
            os.makedirs(self.log_dir, exist_ok=True)
            filepath = os.path.join(self.log_dir, self.log_filename)
            with open(filepath, 'w', encoding='utf-8') as f:
                json.dump(self.logs, f, indent=2, ensure_ascii=False)
        except OSError as exc:
            logger.warning(f"Could not save run log: {exc}")
            return None
        return filepath
