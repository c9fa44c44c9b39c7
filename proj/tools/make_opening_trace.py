"""Writes data/opening_trace.csv: a synthetic chamber-pressure trace during
opening with two maxima (13 and 11) separated by a trough at 6.

Cosine segments between key points keep the extremes exact; the added noise
fades out near each key point so it never creates a higher sample there.
"""
import math
import random
import sys

KEYS = [(0, 0.0), (10, 0.0), (40, 13.0), (60, 6.0), (80, 11.0), (110, 0.0), (130, 0.0)]
NOISE = 0.1


def base(t):
    for (t0, v0), (t1, v1) in zip(KEYS, KEYS[1:]):
        if t0 <= t <= t1:
            s = (1 - math.cos(math.pi * (t - t0) / (t1 - t0))) / 2
            return v0 + (v1 - v0) * s
    raise ValueError(t)


def main(path):
    rng = random.Random(9)
    keys = [t for t, _ in KEYS]
    with open(path, "w", newline="\n") as f:
        f.write("t,p\n")
        for t in range(KEYS[-1][0] + 1):
            fade = min(1.0, min(abs(t - k) for k in keys) / 5.0)
            v = base(t) + NOISE * fade * rng.uniform(-1, 1)
            f.write(f"{t},{round(v, 4):g}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/opening_trace.csv")
