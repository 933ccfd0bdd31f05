#!/usr/bin/env python3
# Copyright 2026  The distse Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Regenerates tests/data/stoi_*.wav and stoi_oracle.csv with pystoi.

The C++ test only reads the frozen outputs; rerun this by hand after
changing the cases.  Needs numpy, scipy and pystoi.
"""

import csv
import os
import sys

import numpy as np
from scipy.io import wavfile
from pystoi import stoi

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def speech_like(rate, seconds, rng):
    # voiced bursts with a drifting f0, separated by short pauses
    n = int(rate * seconds)
    t = np.arange(n) / rate
    f0 = 130.0 + 25.0 * np.sin(2 * np.pi * 0.7 * t)
    phase = 2 * np.pi * np.cumsum(f0) / rate
    x = sum(np.sin(k * phase) / k for k in range(1, 12))
    env = np.clip(np.sin(2 * np.pi * 2.3 * t + rng.uniform(0, np.pi)), 0, None) ** 2
    x = x * env + 0.02 * rng.standard_normal(n) * env
    gap = (t > 0.9 * seconds) & (t < 0.95 * seconds)
    x[gap] = 0.0
    return 0.1 * x / np.sqrt(np.mean(x ** 2))


def main():
    os.makedirs(OUT, exist_ok=True)
    rng = np.random.default_rng(20260101)
    cases = []
    for rate, snr in [(10000, 0.0), (16000, 5.0), (8000, -3.0), (16000, 20.0)]:
        clean = speech_like(rate, 1.6, rng)
        noise = rng.standard_normal(clean.size)
        noise *= np.sqrt(np.mean(clean ** 2) / np.mean(noise ** 2)) * 10 ** (-snr / 20)
        deg = clean + noise
        name = "stoi_%dk_%s" % (rate // 1000, ("m" if snr < 0 else "p") + str(int(abs(snr))))
        wavfile.write(os.path.join(OUT, name + "_clean.wav"), rate, clean.astype(np.float32))
        wavfile.write(os.path.join(OUT, name + "_deg.wav"), rate, deg.astype(np.float32))
        # score the float32-rounded signals the C++ side will read
        c32 = clean.astype(np.float32).astype(np.float64)
        d32 = deg.astype(np.float32).astype(np.float64)
        cases.append((name, rate, stoi(c32, d32, rate, extended=False)))
    # degraded signal is noise alone, independent of the clean one
    rate = 16000
    clean = speech_like(rate, 3.0, rng)
    noise = rng.standard_normal(clean.size) * np.sqrt(np.mean(clean ** 2))
    name = "stoi_16k_indep"
    wavfile.write(os.path.join(OUT, name + "_clean.wav"), rate, clean.astype(np.float32))
    wavfile.write(os.path.join(OUT, name + "_deg.wav"), rate, noise.astype(np.float32))
    c32 = clean.astype(np.float32).astype(np.float64)
    d32 = noise.astype(np.float32).astype(np.float64)
    cases.append((name, rate, stoi(c32, d32, rate, extended=False)))
    with open(os.path.join(OUT, "stoi_oracle.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case", "sample_rate", "stoi"])
        for name, rate, value in cases:
            w.writerow([name, rate, "%.12f" % value])
    for c in cases:
        print(*c, file=sys.stderr)


if __name__ == "__main__":
    main()
