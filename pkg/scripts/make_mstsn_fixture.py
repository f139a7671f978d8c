"""Regenerate the synthetic sunspot fixture shipped with the package.

The file mimics the SIDC monthly smoothed-total layout
(year;month;decimal-year;smoothed;stddev;nobs;provisional) with -1 sentinel
rows at both ends, ~11-year cycles of varying amplitude and a light ripple.
It is NOT real solar data; it exists so the MSTSN pipeline can run offline.
"""
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "cycleres", "data",
                   "mstsn_fixture.csv")

START_YEAR = 1749
MONTHS = 3324  # 1749-01 .. 2025-12
SENTINEL = 6   # undefined half-window at each end, like the real product


def smoothed_value(m: int) -> float:
    cycle = 0.5 * (1.0 + math.sin(2.0 * math.pi * m / 131.0 - math.pi / 2.0))
    amplitude = 155.0 + 85.0 * math.sin(2.0 * math.pi * m / 1685.0 + 0.8)
    ripple = 3.0 * (1.0 + math.sin(2.0 * math.pi * m / 46.0 + 0.3))
    drift = 6.0 * (1.0 + math.sin(2.0 * math.pi * m / 823.0))
    return amplitude * cycle**1.6 + ripple + drift


def main():
    rows = []
    for m in range(MONTHS):
        year = START_YEAR + m // 12
        month = m % 12 + 1
        dec_year = year + (month - 0.5) / 12.0
        if m < SENTINEL or m >= MONTHS - SENTINEL:
            value = -1.0
        else:
            value = round(smoothed_value(m), 1)
        rows.append(f"{year};{month:02d};{dec_year:.3f};{value:6.1f}; -1.0; -1; 1")
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
