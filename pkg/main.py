import sys
from typing import Optional

from src.routes.commands import build_parser, dispatch
from src.utils.logging import configure_logging


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    known, _ = build_parser().parse_known_args(argv)
    configure_logging(known.log_level)
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
