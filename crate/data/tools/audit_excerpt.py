#!/usr/bin/env python3
"""Reference audit of the bundled access-log excerpt.

Parses every line with a single regular expression (independent of the Rust
parser) and prints the accepted/skipped counts, the hourly request buckets and
the spliced-series mass used as frozen expectations in the test suites.
"""

import calendar
import datetime
import os
import re
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.dirname(HERE)

MONTHS = {m: i + 1 for i, m in enumerate(
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"])}

LINE = re.compile(
    r'^(\S+) (\S+) (\S+) \[(\d{2})/([A-Za-z]{3})/(\d{4}):(\d{2}):(\d{2}):(\d{2}) ([+-])(\d{2})(\d{2})\] '
    r'"([^"]*)" (\d{3}) (\d+|-)\s*$')
REQUEST = re.compile(r'^([A-Z]+) (\S.*?)(?: (HTTP/\S+))?$')


def parse(line):
    m = LINE.match(line)
    if not m:
        return None
    day, mon, year, hh, mi, ss = m.group(4), m.group(5), m.group(6), m.group(7), m.group(8), m.group(9)
    if mon not in MONTHS:
        return None
    if not REQUEST.match(m.group(13)):
        return None
    status = int(m.group(14))
    if not 100 <= status <= 599:
        return None
    try:
        stamp = datetime.datetime(int(year), MONTHS[mon], int(day), int(hh), int(mi), int(ss))
    except ValueError:
        return None
    epoch = calendar.timegm(stamp.timetuple())
    sign = 1 if m.group(10) == "+" else -1
    offset = sign * (int(m.group(11)) * 3600 + int(m.group(12)) * 60)
    return epoch - offset


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(DATA, "nasa_style_excerpt.log")
    stamps = []
    skipped = 0
    with open(path, "rb") as f:
        for raw in f:
            line = raw.rstrip(b"\n").rstrip(b"\r").decode("ascii", errors="replace")
            ts = parse(line)
            if ts is None:
                skipped += 1
            else:
                stamps.append(ts)
    print("records", len(stamps))
    print("skipped", skipped)
    first, last = min(stamps), max(stamps)
    start = first - first % 3600
    rows = (last - start) // 3600 + 1
    buckets = [0] * rows
    for ts in stamps:
        buckets[(ts - start) // 3600] += 1
    print("start_epoch", start)
    print("last_epoch", last)
    print("hour_rows", rows)
    print("hourly", ",".join(str(b) for b in buckets))

    hits_total = 0
    with open(os.path.join(DATA, "slashdot_hits.csv")) as f:
        next(f)
        for row in f:
            hits_total += int(row.strip().split(",")[1])
    print("spike_hits", hits_total)


if __name__ == "__main__":
    main()
