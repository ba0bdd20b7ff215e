#!/usr/bin/env python3
"""Regenerates the bundled CSV fixtures.

Every fixture is deterministic (seeded numpy Generator) and written with
shortest round-trip float formatting, so the files are stable across runs.
The expected-residuals file is computed here, independently of the library
under test.
"""

import numpy as np
from pathlib import Path

HERE = Path(__file__).resolve().parent

Z = {0.5: 0.0, 0.9: 1.2815515655446004}


def fmt(x: float) -> str:
    return repr(float(x))


def stamps(n, start_hour=0):
    out = []
    for i in range(n):
        h = start_hour + i
        day, hour = divmod(h, 24)
        out.append(f"2025-03-{1 + day:02d}T{hour:02d}:00:00")
    return out


def write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in range(rows):
            f.write(",".join(col[r] if isinstance(col[r], str) else fmt(col[r])
                             for col in columns) + "\n")


def toy_k2():
    rng = np.random.default_rng(7011)
    T = 48
    t = np.arange(T + 8)
    signal = 10.0 + 2.0 * np.sin(2 * np.pi * t / 24)
    y = signal + 0.4 * rng.standard_normal(T + 8)
    ma = signal + 0.3 * rng.standard_normal(T + 8) + 0.5
    mb = signal + 0.6 * rng.standard_normal(T + 8) - 0.3
    ts = stamps(T + 8)
    write_csv(HERE / "toy_k2_train.csv", ["timestamp", "y", "m:alpha", "m:beta"],
              [ts[:T], y[:T], ma[:T], mb[:T]])
    write_csv(HERE / "toy_k2_future.csv", ["timestamp", "m:alpha", "m:beta"],
              [ts[T:], ma[T:], mb[T:]])
    write_csv(HERE / "toy_k2_actuals.csv", ["timestamp", "y", "m:alpha", "m:beta"],
              [ts[T:], y[T:], ma[T:], mb[T:]])


def k4_t168():
    rng = np.random.default_rng(41168)
    T = 168
    t = np.arange(T)
    base = 50.0 + 8.0 * np.sin(2 * np.pi * t / 24) + 3.0 * np.sin(2 * np.pi * t / 168)
    y = base + rng.standard_normal(T)
    members = {}
    members["ar"] = base + 0.8 * rng.standard_normal(T) + 0.4
    members["ets"] = base + 1.1 * rng.standard_normal(T) - 0.6
    members["nn"] = base + 1.5 * rng.standard_normal(T) + 1.2
    members["naive"] = np.concatenate([[base[0]], y[:-1]])
    ts = stamps(T)
    header = ["timestamp", "y"] + [f"m:{k}" for k in members]
    write_csv(HERE / "k4_t168.csv", header, [ts, y] + list(members.values()))
    res_header = ["timestamp"] + [f"r:{k}" for k in members]
    residuals = [y - members[k] for k in members]
    write_csv(HERE / "k4_t168_residuals.csv", res_header, [ts] + residuals)


def regime(q, tag):
    rng = np.random.default_rng(82510)
    T_train, H = 300, 100
    T = T_train + H
    t = np.arange(T)
    signal = 10.0 + 2.0 * np.sin(2 * np.pi * t / 24)
    A = np.array([[0.95, 0.05], [0.10, 0.90]])
    cum = np.cumsum(A, axis=1)
    state = np.zeros(T, dtype=int)
    for i in range(1, T):
        state[i] = np.searchsorted(cum[state[i - 1]], rng.uniform())
    y = signal + 0.3 * rng.standard_normal(T)
    zq = Z[q]
    noise_a = np.where(state == 0, 0.1, 0.9) * rng.standard_normal(T)
    noise_b = np.where(state == 1, 0.1, 0.9) * rng.standard_normal(T)
    ma = signal + 2.0 + noise_a + zq * 0.35
    mb = signal - 2.0 + noise_b + zq * 0.35
    ts = stamps(T)
    header = ["timestamp", "y", "m:early", "m:late"]
    write_csv(HERE / f"regime_train_{tag}.csv", header,
              [ts[:T_train], y[:T_train], ma[:T_train], mb[:T_train]])
    write_csv(HERE / f"regime_test_{tag}.csv", header,
              [ts[T_train:], y[T_train:], ma[T_train:], mb[T_train:]])


def main():
    toy_k2()
    k4_t168()
    regime(0.5, "q50")
    regime(0.9, "q90")
    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
