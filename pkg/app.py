#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
wco-lab front end.

    python app.py classify --job jobs/unitary_involution.json
    python app.py spectrum --job jobs/diagonal_spectrum.json --degree 4

Defaults (degree, tolerances, sample counts, worker threads, log level) can
be set in a ``.env`` file; see README.md.
"""

import sys

from wcolab.cli import main

if __name__ == "__main__":
    sys.exit(main())
