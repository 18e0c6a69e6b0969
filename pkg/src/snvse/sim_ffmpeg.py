"""``python -m snvse.sim_ffmpeg``: simulated encoder entry point."""

import sys

from .sim import main_ffmpeg

if __name__ == "__main__":
    sys.exit(main_ffmpeg())
