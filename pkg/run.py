import sys

from src.plexpand.cli import main

if __name__ == "__main__":
    sys.exit(main())
