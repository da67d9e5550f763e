"""Allow running as `python -m srtsim`."""

from srtsim.main import main

main()
