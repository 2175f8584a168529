"""Reference backend for the subprocess oracle protocol.

Reads lines "n m" on stdin and answers p(n) mod m, one line each, in order.
p(n) comes from sympy's Hardy-Ramanujan-Rademacher implementation.
Run as:  python -m etacong.backends.partition
"""
import sys

from sympy.functions.combinatorial.numbers import partition


def main() -> int:
    out = sys.stdout
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        n_text, m_text = line.split()
        n, m = int(n_text), int(m_text)
        value = int(partition(n)) if n >= 0 else 0
        out.write(f"{value % m}\n")
        out.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
