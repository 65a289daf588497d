import argparse
import csv
import logging
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from model_core import Mode, NondimParams  # noqa: E402
from stability import regime_case  # noqa: E402

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger('regime_sweep')


def sweep(low, high, count, mode):
    """Yield (a12, a21, case) over a count x count lattice of interaction strengths"""
    values = np.linspace(low, high, count)
    for a12 in values:
        for a21 in values:
            case = regime_case(NondimParams(a12=float(a12), a21=float(a21), rho=1.0, mode=mode))
            yield float(a12), float(a21), case.value


def write_sweep(output, low, high, count, mode):
    """
    Write the regime map as CSV rows a12,a21,mode,case

    Args:
        output: Path of the CSV file, or '-' for stdout
        low, high: Lattice bounds for both interaction strengths
        count: Lattice points per axis
        mode: Mode of the game
    """
    handle = sys.stdout if output == '-' else open(output, 'w', newline='', encoding='utf-8')
    try:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(["a12", "a21", "mode", "case"])
        rows = 0
        for a12, a21, case in sweep(low, high, count, mode):
            writer.writerow([format(a12, '.6g'), format(a21, '.6g'), mode.value, case])
            rows += 1
    finally:
        if handle is not sys.stdout:
            handle.close()
    logger.info(f"Wrote {rows} regime rows to {output}")
    return rows


def main():
    parser = argparse.ArgumentParser(description='Tabulate the regime case over an a12 x a21 lattice')
    parser.add_argument('--output', default='-', help='CSV file to write (default stdout)')
    parser.add_argument('--low', type=float, default=0.1, help='Smallest interaction strength')
    parser.add_argument('--high', type=float, default=2.0, help='Largest interaction strength')
    parser.add_argument('--count', type=int, default=20, help='Lattice points per axis')
    parser.add_argument('--mode', choices=[m.value for m in Mode], default=Mode.COMPETITIVE.value)

    args = parser.parse_args()

    if not 0 < args.low < args.high or args.count < 2:
        parser.error("need 0 < low < high and count >= 2")
    write_sweep(args.output, args.low, args.high, args.count, Mode(args.mode))


if __name__ == '__main__':
    main()
