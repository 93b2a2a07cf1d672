"""Convert Linux ``ping -D`` output into sample CSV rows.

    ping -D -i 2 <host> > ireland_to_singapore.log
    python scripts/ping_to_samples.py --src Ireland --dst Singapore ireland_to_singapore.log >> samples.csv

Pass --header to emit the ``src,dst,timestamp,rtt_ms`` header first.
"""

import argparse
import csv
import re
import sys

LINE = re.compile(r"^\[(?P<ts>\d+(?:\.\d+)?)\].*time[=<](?P<rtt>\d+(?:\.\d+)?) ?ms")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--src", required=True)
    ap.add_argument("--dst", required=True)
    ap.add_argument("--header", action="store_true")
    ap.add_argument("logs", nargs="+")
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    if args.header:
        w.writerow(["src", "dst", "timestamp", "rtt_ms"])
    for path in args.logs:
        with open(path) as fh:
            for line in fh:
                m = LINE.match(line.strip())
                if m:
                    w.writerow([args.src, args.dst, m["ts"], m["rtt"]])


if __name__ == "__main__":
    main()
