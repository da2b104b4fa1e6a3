import os
import sys

# Ensure src is in path
sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
