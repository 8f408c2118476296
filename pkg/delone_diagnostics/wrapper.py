#!/usr/bin/env python

import logging
import os
import sys

from delone_diagnostics.errors import ScaleError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SCALE = 3


def cli_decorator(script_path: str, timestamp: str):
    """Decorate the main function of a CLI script.

    The script path (__file__) and start timestamp (yymmdd_hhmmss) name the log
    file. The wrapped main sets up logging and turns its outcome into an exit code.
    """
    script_name: str = os.path.basename(script_path).split(".")[0]

    def _cli_decorator(script_main):
        def cli_wrapper(args):
            """General wrapper for CLI scripts."""

            # Name log file
            log_filename: str = args.log or (
                "_".join([script_name, args.subcommand, timestamp]) + ".log"
            )

            # Set up logging
            logging.basicConfig(
                filename=log_filename,
                filemode="w",
                format="%(levelname)s: %(message)s",
                level=logging.INFO,
                force=True,
            )

            # Start logging
            logging.info(f"Script '{script_name}' started at {timestamp}.")
            args_str = "\n\t".join(
                [f"'{arg}': {getattr(args, arg)}" for arg in vars(args)]
            )
            logging.info(f"Script called with arguments: \n\t{args_str}")

            # Run
            try:
                script_main(args)

            # Window or margin too small for the request
            except ScaleError as e:
                logging.error(str(e), exc_info=True)
                logging.shutdown()
                sys.stderr.write(f"Scale error: {e}\n")
                sys.exit(EXIT_SCALE)

            # On script error
            except Exception as e:
                logging.error(str(e), exc_info=True)
                logging.shutdown()
                sys.stderr.write(f"{e}\n")
                sys.exit(EXIT_INPUT)

            # On script success
            else:
                logging.info("Script completed successfully.")
                logging.shutdown()
                sys.exit(EXIT_OK)

        return cli_wrapper

    return _cli_decorator
