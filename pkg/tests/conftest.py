import sys
from pathlib import Path

# Tests import shared generators as a plain module.
sys.path.insert(0, str(Path(__file__).parent))
