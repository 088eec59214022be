#!/usr/bin/env python3
"""Regenerate the bundled synthetic traces.

Writes data/nasa_style_excerpt.log (10,000 lines of Common Log Format,
including a small number of deliberately malformed lines) and
data/slashdot_hits.csv (hits per 5 minutes over a 30-hour flash-crowd episode).

Output is fully determined by the seeds below.
"""

import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.dirname(HERE)

TOTAL_LINES = 10_000
MALFORMED = 57
NO_PROTOCOL = 40
HOURS = 264
# 1995-08-01 00:00:00 -0400 == 1995-08-01 04:00:00 UTC
START_UTC = 807249600
ZONE = -4 * 3600
MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]

PATHS = [
    ("/images/NASA-logosmall.gif", 786),
    ("/images/KSC-logosmall.gif", 1204),
    ("/shuttle/countdown/", 3985),
    ("/shuttle/countdown/count.gif", 40310),
    ("/ksc.html", 7280),
    ("/history/apollo/", 6245),
    ("/shuttle/missions/sts-69/mission-sts-69.html", 10136),
    ("/shuttle/missions/sts-68/news/sts-68-mcc-05.txt", 1839),
    ("/images/MOSAIC-logosmall.gif", 363),
    ("/images/USA-logosmall.gif", 234),
    ("/images/WORLD-logosmall.gif", 669),
    ("/shuttle/missions/missions.html", 8677),
    ("/images/launch-logo.gif", 1713),
    ("/facilities/lc39a.html", 7008),
    ("/history/apollo/apollo-13/apollo-13.html", 18114),
    ("/shuttle/technology/sts-newsref/stsref-toc.html", 84907),
    ("/software/winvn/winvn.html", 9867),
    ("/elv/elvpage.htm", 8837),
    ("/", 7074),
]

DOMAINS = ["inetnebr.com", "prodigy.com", "aol.com", "compuserve.com",
           "netcom.com", "ix.netcom.com", "uu.net", "psi.net", "mindspring.com"]


def local_time_fields(epoch_utc):
    """Split an epoch into (day, month, year, hh, mm, ss) in the -0400 zone."""
    t = epoch_utc + ZONE
    days, rem = divmod(t, 86400)
    hh, rem = divmod(rem, 3600)
    mm, ss = divmod(rem, 60)
    # civil-from-days (Howard Hinnant)
    z = days + 719468
    era = z // 146097
    doe = z - era * 146097
    yoe = (doe - doe // 1460 + doe // 36524 - doe // 146096) // 365
    y = yoe + era * 400
    doy = doe - (365 * yoe + yoe // 4 - yoe // 100)
    mp = (5 * doy + 2) // 153
    d = doy - (153 * mp + 2) // 5 + 1
    m = mp + 3 if mp < 10 else mp - 9
    if m <= 2:
        y += 1
    return d, m, y, hh, mm, ss


def clf_time(epoch_utc):
    d, m, y, hh, mm, ss = local_time_fields(epoch_utc)
    return "%02d/%s/%04d:%02d:%02d:%02d -0400" % (d, MONTHS[m - 1], y, hh, mm, ss)


def hour_weight(h):
    local_hour = h % 24
    day = h // 24
    diurnal = 1.0 + 0.75 * math.sin(2.0 * math.pi * (local_hour - 8) / 24.0)
    # Aug 1 1995 was a Tuesday; days 4 and 5 are the weekend.
    weekend = 0.65 if day % 7 in (4, 5) else 1.0
    return max(diurnal, 0.1) * weekend


def make_hosts(rng):
    hosts = []
    for i in range(300):
        if rng.random() < 0.4:
            hosts.append("%d.%d.%d.%d" % (rng.randint(128, 209), rng.randint(0, 255),
                                          rng.randint(0, 255), rng.randint(1, 254)))
        else:
            prefix = rng.choice(["pm", "dial", "ppp", "slip", "in", "ix-", "www-"])
            hosts.append("%s%d.%s" % (prefix, rng.randint(1, 99), rng.choice(DOMAINS)))
    return hosts


def valid_line(rng, hosts, ts, protocol=True):
    path, size = rng.choice(PATHS)
    r = rng.random()
    if r < 0.85:
        status, nbytes = 200, str(size)
    elif r < 0.94:
        status, nbytes = 304, "-" if rng.random() < 0.7 else "0"
    elif r < 0.97:
        status, nbytes = 302, str(rng.randint(50, 300))
    else:
        status, nbytes = 404, "-"
    method = "GET" if rng.random() < 0.97 else rng.choice(["HEAD", "POST"])
    request = "%s %s HTTP/1.0" % (method, path) if protocol else "%s %s" % (method, path)
    return '%s - - [%s] "%s" %d %s' % (rng.choice(hosts), clf_time(ts), request, status, nbytes)


def malformed_line(rng, hosts, ts, kind):
    good = valid_line(rng, hosts, ts)
    if kind == 0:
        return "garbage line without brackets %d" % rng.randint(0, 10**6)
    if kind == 1:
        return good[: good.index("[") + rng.randint(2, 12)]
    if kind == 2:
        head, _, _ = good.rpartition('" ')
        return head + '" abc 512'
    if kind == 3:
        head, _, _ = good.rpartition('" ')
        return head + '" 999 512'
    if kind == 4:
        head = good[: good.index('"')]
        return head + '"" 400 -'
    if kind == 5:
        return good.replace("/Aug/", "/Foo/")
    head, _, _ = good.rpartition(" ")
    return head + " 12a"


def make_excerpt():
    rng = random.Random(19950801)
    hosts = make_hosts(rng)
    weights = [hour_weight(h) for h in range(HOURS)]
    total_w = sum(weights)
    cum = []
    acc = 0.0
    for w in weights:
        acc += w / total_w
        cum.append(acc)

    n_valid = TOTAL_LINES - MALFORMED
    stamps = []
    for _ in range(n_valid):
        u = rng.random()
        h = next((i for i, c in enumerate(cum) if u <= c), HOURS - 1)
        stamps.append(START_UTC + h * 3600 + rng.randint(0, 3599))
    stamps.sort()
    # a few out-of-order neighbours, as seen in multi-worker server logs
    for _ in range(25):
        i = rng.randint(0, n_valid - 2)
        stamps[i], stamps[i + 1] = stamps[i + 1], stamps[i]

    no_proto = set(rng.sample(range(n_valid), NO_PROTOCOL))
    lines = [valid_line(rng, hosts, ts, protocol=(i not in no_proto))
             for i, ts in enumerate(stamps)]
    for k in range(MALFORMED):
        pos = rng.randint(0, len(lines))
        ts = stamps[min(pos, n_valid - 1)]
        lines.insert(pos, malformed_line(rng, hosts, ts, k % 7))

    with open(os.path.join(DATA, "nasa_style_excerpt.log"), "w", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def poisson(rng, lam):
    if lam <= 0:
        return 0
    limit = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def slashdot_rate(minute):
    # Abrupt jump to about half the peak, a climb to the peak some seven
    # hours later, then a slow decay.
    onset = 50.0
    if minute < onset:
        return 1.0
    t = minute - onset
    rise = 1.0 - math.exp(-t / 15.0)
    plateau = 0.5 * rise * math.exp(-max(t - 600.0, 0.0) / 300.0)
    climb = 0.5 * math.exp(-((t - 420.0) / 150.0) ** 2)
    return 1.0 + 80.0 * (plateau + climb)


def make_slashdot():
    rng = random.Random(20000726)
    # 2000-07-26 00:00:00 UTC
    start = 964569600
    with open(os.path.join(DATA, "slashdot_hits.csv"), "w", newline="\n") as f:
        f.write("time_seconds,hits\n")
        for i in range(360):
            lam = slashdot_rate(i * 5.0 + 2.5) * 1.0
            f.write("%d,%d\n" % (start + 300 * i, poisson(rng, lam)))


if __name__ == "__main__":
    make_excerpt()
    make_slashdot()
