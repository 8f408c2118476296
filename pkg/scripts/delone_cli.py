#!/usr/bin/env python
from argparse import ArgumentParser, ArgumentTypeError
from datetime import datetime as dt

from delone_diagnostics import commands
from delone_diagnostics.wrapper import cli_decorator

DESC = """Construct Delone sets and run finite-window diagnostics on them.

Inputs are generator spec files (--spec) or point files (--points). Every
analysis works on a window B_R(0) given by --window and reports what it finds
at that scale, which is evidence and never a proof.

Exit codes: 0 on success, 2 for invalid input, 3 if a window or margin is too
small for the request.
"""

TIMESTAMP: str = dt.now().strftime("%y%m%d_%H%M%S")


def parse_epsilon(arg_string: str) -> dict:
    """Parse an epsilon argument into a dictionary.

    Example:

        --epsilon 0.1           -> {'value': 0.1, 'unit': 'abs'}
        --epsilon 0.05*r_min    -> {'value': 0.05, 'unit': 'r_min'}

    The second form is resolved against the packing radius measured on the window.
    """
    value, _, unit = arg_string.replace(" ", "").partition("*")
    if unit not in ["", "r_min"]:
        raise ArgumentTypeError(f"Invalid epsilon unit '{unit}' in '{arg_string}'")
    epsilon = float(value)
    if epsilon <= 0:
        raise ArgumentTypeError(f"Epsilon must be positive, got '{arg_string}'")
    return {"value": epsilon, "unit": unit or "abs"}


def parse_ops(arg_string: str) -> list[str]:
    ops = [op.strip() for op in arg_string.split(",") if op.strip()]
    unknown = [op for op in ops if op not in commands.ANALYSES]
    if unknown:
        raise ArgumentTypeError(
            f"Unknown analyses {unknown}, expected some of {commands.ANALYSES}"
        )
    return ops


@cli_decorator(script_path=__file__, timestamp=TIMESTAMP)
def main(args):
    f"""Set up log, parse args and run one subcommand.

    Example 1:

        python {__file__} generate \
        --spec      data/specs/sturmian_golden.json \
        --window    100 \
        --out       golden.txt

    Example 2:

        python {__file__} analyze \
        --points    golden.txt \
        --window    100 \
        --ops       delone_check,flc_census \
        --radius    3

    Example 3:

        python {__file__} compare \
        --spec      data/specs/integers.json \
        --spec      data/specs/integers_shifted.json \
        --r-cap     100

    Example 4:

        python {__file__} diagnose \
        --spec      data/specs/kronecker_cosine2.json \
        --seed      0
    """
    function_to_use = getattr(commands, f"cmd_{args.subcommand}")
    function_to_use(args)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(description=DESC)
    parser.add_argument(
        "subcommand",
        type=str,
        choices=["generate", "analyze", "compare", "diagnose"],
        help="Which subcommand to run",
    )
    parser.add_argument(
        "--spec", type=str, action="append", help="Generator spec file (repeatable)"
    )
    parser.add_argument(
        "--points", type=str, action="append", help="Point-set file (repeatable)"
    )
    parser.add_argument("--window", type=float, help="Radius of the window B_R(0)")
    parser.add_argument(
        "--radius", type=float, default=3.0, help="Patch or probe radius r"
    )
    parser.add_argument(
        "--epsilon",
        type=parse_epsilon,
        help="Tolerance epsilon, absolute or as a multiple like '0.05*r_min'",
    )
    parser.add_argument(
        "--r-cap", type=float, default=100.0, help="Largest radius of the distance"
    )
    parser.add_argument(
        "--tol", type=float, default=1e-9, help="Matching tolerance of patches"
    )
    parser.add_argument(
        "--seed", type=int, default=0, help="Seed of the spot-check sampling"
    )
    parser.add_argument(
        "--ops",
        type=parse_ops,
        default=["delone_check", "detect_periods"],
        help="Comma-separated analyses for 'analyze'",
    )
    parser.add_argument(
        "--half-width", type=float, default=0.4, help="Half-width of the Bohr bump"
    )
    parser.add_argument("--pitch", type=float, help="Grid pitch of the Bohr diagnostic")
    parser.add_argument(
        "--format",
        type=str,
        choices=["points", "json", "csv"],
        help="Output format (default: points for generate, json otherwise)",
    )
    parser.add_argument("--out", type=str, help="Output file (default: stdout)")
    parser.add_argument("--log", type=str, help="Log file path")
    return parser


if __name__ == "__main__":
    # Parse args
    args = build_parser().parse_args()

    main(args)
