from pathlib import Path

# Project root directory
BASE_PATH = Path(__file__).resolve().parent.parent

# Log file path
LOG_DIR = BASE_PATH / 'log'

# Default experiment output directory
OUTPUT_DIR = BASE_PATH.parent / 'output'
