import os
import sys
from pathlib import Path

# single-threaded BLAS keeps the complexity-band timing measurement stable
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

sys.path.insert(0, str(Path(__file__).parent))
