"""
Builtin network exporter
------------------------
Writes every builtin network as a JSON document under the networks directory
(QBN_NETWORKS_DIR, default <repo>/networks), or checks that the files there
still describe the builtins.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from app.config import configure_logging, get_settings  # noqa: E402
from app.exceptions import QBNError  # noqa: E402
from app.network.builtin import BUILTIN_NETWORKS  # noqa: E402
from app.network.operations import load_network, network_to_document, serialize_network  # noqa: E402

logger = logging.getLogger(__name__)


def export(output_dir: Path) -> List[Path]:
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, factory in BUILTIN_NETWORKS.items():
        path = output_dir / f"{name}.json"
        path.write_text(serialize_network(factory()), encoding="utf-8", newline="\n")
        logger.info("Wrote %s", path)
        written.append(path)
    return written


def stale(output_dir: Path) -> List[str]:
    """Names of builtins whose file is missing or describes a different network"""
    names = []
    for name, factory in BUILTIN_NETWORKS.items():
        path = output_dir / f"{name}.json"
        try:
            current = network_to_document(load_network(path))
        except (OSError, QBNError):
            current = None
        if current != network_to_document(factory()):
            names.append(name)
    return names


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--output-dir", type=Path, default=get_settings().networks_dir)
    parser.add_argument("--check", action="store_true", help="compare instead of writing")
    args = parser.parse_args(argv)
    configure_logging("INFO")

    if args.check:
        names = stale(args.output_dir)
        for name in names:
            print(f"{name}: out of date")
        return 1 if names else 0

    for path in export(args.output_dir):
        print(f"- {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
