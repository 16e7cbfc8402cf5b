#!/usr/bin/env python
"""
Simple script to run the atomicity CLI from a source checkout.
"""

from kernel_atomicity.cli import main


if __name__ == "__main__":
    main()
