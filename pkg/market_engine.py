#!/usr/bin/env python3
"""
Entry point for the contract-market engine
Usage: python market_engine.py [--config FILE] [--json] <command> ...
"""

import logging
import sys

from contract_market.cli import cli

logger = logging.getLogger(__name__)


def main():
    """Main entry point"""
    try:
        cli(prog_name="market_engine")
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
