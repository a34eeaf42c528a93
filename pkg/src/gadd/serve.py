"""
Serve a builtin model over the external line protocol.

    python -m gadd.serve quadratic_symmetric [a0 a1 b0 b1 c0 c1]

Reads one line of space-separated floats per evaluation from stdin and
writes the model value on its own line.  Useful for exercising the
black-box path against the exact one.
"""

import sys

import numpy as np

from .models import quadratic_symmetric

BUILTINS = {"quadratic_symmetric": quadratic_symmetric}


def serve(poly, dimension, stdin=sys.stdin, stdout=sys.stdout):
    poly = poly.embed(tuple(range(dimension)))
    for line in stdin:
        x = np.array([float(t) for t in line.split()])
        stdout.write(format(float(poly(x)), ".17g") + "\n")
        stdout.flush()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] not in BUILTINS:
        sys.stderr.write(f"usage: python -m gadd.serve {{{','.join(BUILTINS)}}} [params...]\n")
        return 2
    poly = BUILTINS[argv[0]](*[float(a) for a in argv[1:]])
    serve(poly, 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
