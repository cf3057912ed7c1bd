"""Entry point for the fixture API server."""

import json
import sys


def func_parse(line):
    """Split a request line into verb and payload."""
    verb, _, payload = line.partition(" ")
    return verb, json.loads(payload or "{}")


def main(argv):
    for line in sys.stdin:
        print(func_parse(line.strip()))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
