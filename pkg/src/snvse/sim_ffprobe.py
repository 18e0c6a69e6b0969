"""``python -m snvse.sim_ffprobe``: simulated prober entry point."""

import sys

from .sim import main_ffprobe

if __name__ == "__main__":
    sys.exit(main_ffprobe())
