import os
import sys
from dotenv import load_dotenv
from loguru import logger

# =======================================================
# 0. 加载环境变量 (必须放在最前面)
# =======================================================
# 搜索项目根目录下的 .env 文件，所有常量都允许被环境变量覆盖
load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"环境变量 {name} 需要整数，收到: {value!r}")


def _env_int_list(name: str, default: list) -> list:
    value = os.getenv(name)
    if not value:
        return list(default)
    return [int(v) for v in value.replace(";", ",").split(",") if v.strip()]


# =======================================================
# 1. 基础路径配置 (自动适应 Windows/Linux)
# =======================================================

# 获取项目根目录
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# 数据存储目录
DATA_PATH = os.path.join(BASE_DIR, 'data')
SCENARIOS_DIR = os.path.join(BASE_DIR, 'scenarios')
REPORTS_DIR = os.getenv("CONIC_REPORTS_DIR", os.path.join(DATA_PATH, 'reports'))
GOLDEN_PATH = os.getenv("CONIC_GOLDEN_PATH", os.path.join(DATA_PATH, 'golden_certificate.txt'))


# =======================================================
# 2. 日志配置
# =======================================================
LOG_LEVEL = os.getenv("CONIC_LOG_LEVEL", "INFO")

logger.remove()
logger.add(sys.stderr, level=LOG_LEVEL,
           format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {message}")


# =======================================================
# 3. 精确算术默认参数
# =======================================================

# 默认素域特征 (必须是 >= 5 的素数)
DEFAULT_PRIME = _env_int("CONIC_PRIME", 101)
DEFAULT_SEED = _env_int("CONIC_SEED", 20240611)

# 点采样与除子支撑允许的最大扩域次数
EXTENSION_CAP = _env_int("CONIC_EXTENSION_CAP", 8)

# 评估核方法在 dk+1 个点之外额外多取的点数
SAMPLE_MARGIN = _env_int("CONIC_SAMPLE_MARGIN", 3)

# 局部级数截断: N = 2*deg(f)*d + TRUNCATION_MARGIN
TRUNCATION_MARGIN = _env_int("CONIC_TRUNCATION_MARGIN", 1)

# 素域上穷举采样的阈值 (q^2 以内穷举，否则随机抽取)
EXHAUSTIVE_SAMPLING_LIMIT = _env_int("CONIC_EXHAUSTIVE_LIMIT", 40000)

# "一般点" 的操作化: 带种子的样本数
GENERIC_TRIALS = _env_int("CONIC_GENERIC_TRIALS", 10)

# 随机坐标变换的最大重试次数
CHART_ATTEMPTS = _env_int("CONIC_CHART_ATTEMPTS", 12)


# =======================================================
# 4. 椭圆曲线与束搜索参数
# =======================================================
TORSION_ORDER = 16

# 素数升级阶梯: 扫描为空时依次换更大的素数
PRIME_LADDER = _env_int_list("CONIC_PRIME_LADDER", [
    37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101,
    103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
    173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313,
    317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397,
    401, 409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463, 467,
    479, 487, 491, 499, 503, 509, 521, 523, 541, 547, 557, 563, 569,
    571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643,
    647, 653, 659, 661, 673, 677, 683, 691, 701, 709, 719, 727, 733,
    739, 743, 751, 757, 761, 769, 773, 787, 797, 809, 811, 821, 823,
    827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911,
    919, 929, 937, 941, 947, 953, 967, 971, 977, 983, 991, 997, 1009,
    1013, 1019, 1021,
])
MAX_PRIME = _env_int("CONIC_MAX_PRIME", 1021)

# 每个素数上尝试的 (a, b) 曲线数
CURVES_PER_PRIME = _env_int("CONIC_CURVES_PER_PRIME", 400)

# 顶点扫描: 每批点数、最大扫描点数 (0 表示不限)
SCAN_BATCH = _env_int("CONIC_SCAN_BATCH", 2048)
SCAN_BUDGET = _env_int("CONIC_SCAN_BUDGET", 0)

# 线程池大小
MAX_WORKERS = _env_int("CONIC_MAX_WORKERS", max(1, min(8, os.cpu_count() or 1)))

# 扩域成员的个数 (不可约性次要证据)
EXTENSION_MEMBERS = 10
SMOOTH_MEMBER_DRAWS = 20


# =======================================================
# 5. 目录创建
# =======================================================

def ensure_directories():
    """在程序启动时自动创建不存在的文件夹"""
    dirs_to_create = [DATA_PATH, SCENARIOS_DIR, REPORTS_DIR]
    for d in dirs_to_create:
        if not os.path.exists(d):
            os.makedirs(d)
            logger.debug(f"[Config] Created directory: {d}")


ensure_directories()
