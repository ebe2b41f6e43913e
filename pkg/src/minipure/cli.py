"""Batch proof-script checker.

Exit codes: 0 everything proved, 1 proof failure, 2 parse error,
3 elaboration or type error.
"""

from __future__ import annotations

import argparse
import sys

from .elaborate import ElabError
from .hott import TheoryError, build_theory
from .kernel import KernelError
from .parser import ScriptSyntaxError
from .runner import Options, check_files


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="minipure",
        description="Check theory/proof scripts against the built-in "
                    "type-theory object logic.")
    sub = ap.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", help="check proof scripts")
    chk.add_argument("files", nargs="+", help="script files to check")
    chk.add_argument("--trace", action="store_true",
                     help="print each proof state after every tactic")
    chk.add_argument("--dump-states", action="store_true",
                     help="also print the underlying state theorem")
    chk.add_argument("--max-unifiers", type=int, default=32, metavar="K")
    chk.add_argument("--search-depth", type=int, default=10, metavar="D")
    chk.add_argument("--fuel", type=int, default=10_000, metavar="N")
    args = ap.parse_args(argv)

    options = Options(max_unifiers=args.max_unifiers,
                      search_depth=args.search_depth,
                      fuel=args.fuel,
                      trace=args.trace,
                      dump_states=args.dump_states)
    try:
        reports = check_files(args.files, build_theory, options)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ScriptSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return 2
    except (ElabError, KernelError, TheoryError) as e:
        print(f"elaboration error: {e}", file=sys.stderr)
        return 3

    failed = errored = False
    for report in reports:
        print(report.name)
        for line in report.summary_lines():
            print(line)
        for item in report.items:
            status = getattr(item, "status", None)
            if status == "error":
                errored = True
            elif not item.ok:
                failed = True
    if errored:
        return 3
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
