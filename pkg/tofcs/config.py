import math
import os
from pathlib import Path
from dotenv import load_dotenv

# โหลด .env ถ้ามี
env_path = Path(__file__).resolve().parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

TOOL_VERSION = "0.3.0"

SPEED_OF_LIGHT = 299_792_458.0  # m/s

DEFAULT_SEED = int(os.getenv("TOFCS_SEED", "0"))
DEFAULT_THREADS = int(os.getenv("TOFCS_THREADS", "1"))
LOG_DIR = Path(os.getenv("TOFCS_LOG_DIR", "logs"))

# ความกว้าง row segment ของ sensing block และขนาด block สำหรับ reconstruct
DEFAULT_SEGMENT_WIDTH = int(os.getenv("TOFCS_SEGMENT_WIDTH", "14"))
DEFAULT_BLOCK_SIZE = int(os.getenv("TOFCS_BLOCK_SIZE", "28"))

# ω = π·10⁸ rad/s → d_max ≈ 3 m
DEFAULT_OMEGA = float(os.getenv("TOFCS_OMEGA", str(math.pi * 1e8)))
DEFAULT_EMITTED_AMPLITUDE = 1.0

# จำกัดจำนวน support ตอน estimate RIP แบบ exhaustive
RIP_SUPPORT_CAP = 1_000_000

# block ที่ r = w ถูกสุ่มใหม่จนกว่า |DFT(v)| ทุกตัวอยู่ในช่วง [ref / spread, ref · spread]
# โดย ref = a·√(w·(1 − p_zero)) (RMS ที่คาดไว้) → condition number ≤ spread²
BLOCK_SPECTRUM_SPREAD = float(os.getenv("TOFCS_BLOCK_SPECTRUM_SPREAD", "2"))
