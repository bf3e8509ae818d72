from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional
import json

from .config import LOG_DIR


# log ของแต่ละ run = <out>/run_log.jsonl, ถ้าไม่ระบุ out ใช้ <LOG_DIR>/run_log.jsonl
LOG_NAME = "run_log.jsonl"


def _log_file(out_dir: Optional[str | Path]) -> Path:
    base = Path(out_dir) if out_dir is not None else LOG_DIR
    base.mkdir(parents=True, exist_ok=True)
    return base / LOG_NAME


def _jsonable(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return str(value)
    return value


def append_log(entry: Dict[str, Any], out_dir: Optional[str | Path] = None) -> None:
    """
    บันทึก 1 event ลงไฟล์แบบ JSONL (แถวละ 1 JSON)

    entry ควรมี key อย่างน้อย:
      - event (เช่น "reconstruct", "sweep_row", "skipped")
    """
    payload = {k: _jsonable(v) for k, v in entry.items()}
    payload.setdefault("ts", datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"))

    with _log_file(out_dir).open("a", encoding="utf-8") as f:
        f.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")

