from __future__ import annotations

"""
errors.py

exception ของทั้งแพ็กเกจ แต่ละตัวผูกกับ exit code ของสคริปต์:

- 2: argument / config error
- 3: data / format error
- 4: solver failure

exception นอกแพ็กเกจ: ValueError → 2, OSError → 3, อื่น ๆ → 4
"""


class TofcsError(Exception):
    exit_code = 4


class ConfigError(TofcsError, ValueError):
    """ค่า config หรือ argument ใช้ไม่ได้"""
    exit_code = 2


class RipCapExceededError(TofcsError):
    """จำนวน support เกิน cap ของโหมด exhaustive"""
    exit_code = 2


class DimensionError(TofcsError, ValueError):
    exit_code = 3


class GeometryError(TofcsError, ValueError):
    """layout ของ sensing matrix / partition ไม่เข้ากัน"""
    exit_code = 3


class DomainError(TofcsError, ValueError):
    """ค่าอยู่นอกช่วงที่นิยามไว้ เช่น depth ติดลบ หรือ phase นอก [0, 2π)"""
    exit_code = 3


class DataFormatError(TofcsError):
    """ไฟล์ matrix / image / manifest อ่านไม่ได้"""
    exit_code = 3


class UndefinedMetricsError(TofcsError, ValueError):
    exit_code = 3


class SolverError(TofcsError):
    exit_code = 4


def exit_code_for(exc: BaseException) -> int:
    """map exception → exit code ของ CLI"""
    if isinstance(exc, TofcsError):
        return exc.exit_code
    if isinstance(exc, ValueError):
        return 2
    if isinstance(exc, OSError):
        return 3
    # อย่างอื่นถือเป็นความล้มเหลวระหว่างรัน
    return 4
