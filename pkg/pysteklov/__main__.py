"""
Command-line entry point:

    python -m pysteklov verify --config configs/disk.cfg --out results/disk

Exit status is 0 when every check passes, 1 when a check fails, 2 for an invalid
configuration and 3 for any other numerical error.
"""
import argparse
import logging
import sys

from pysteklov.config import ExperimentConfig
from pysteklov.errors import ConfigError, SteklovError
from pysteklov.experiment import COMMANDS, Experiment

logger = logging.getLogger("pysteklov")


def parseArguments(argv=None):
    parser = argparse.ArgumentParser(prog="pysteklov",
                                     description="Steklov eigenfunctions: spectra, harmonic extensions, "
                                                 "FBI transforms and decay fits")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="Experiment file (.cfg or .json)")
    parser.add_argument("--out", default=None, help="Output directory, overrides [output] directory")
    parser.add_argument("--threads", type=int, default=1, help="Extension worker threads, 0 for all cores")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parseArguments(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = ExperimentConfig.fromFile(args.config)
        experiment = Experiment(config, args.out, args.threads)
        passed = experiment.run(args.command)
    except ConfigError as error:
        print(str(error), file=sys.stderr)
        return 2
    except SteklovError as error:
        print(str(error), file=sys.stderr)
        return 3
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
