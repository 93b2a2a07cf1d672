"""Write a synthetic 15-region RTT matrix for demos and CLI smoke tests.

RTTs come from great-circle distance between approximate region coordinates,
assuming ~200 km/ms in fiber and a 1.6x path inflation, plus 2 ms of fixed
overhead. These are NOT measurements.
"""

import math
import sys

import numpy as np

from georank.core import RttMatrix, SiteCatalog
from georank.rtt import store_matrix

REGIONS = {
    "NVirginia": (38.9, -77.4),
    "Ohio": (40.0, -83.0),
    "NCalifornia": (37.4, -121.9),
    "Oregon": (45.8, -119.7),
    "Mumbai": (19.1, 72.9),
    "Seoul": (37.6, 127.0),
    "Singapore": (1.35, 103.8),
    "Sydney": (-33.9, 151.2),
    "Tokyo": (35.7, 139.7),
    "CanadaCentral": (45.5, -73.6),
    "Frankfurt": (50.1, 8.7),
    "Ireland": (53.3, -6.3),
    "London": (51.5, -0.1),
    "Paris": (48.9, 2.35),
    "SaoPaulo": (-23.5, -46.6),
}


def great_circle_km(a, b):
    lat1, lon1, lat2, lon2 = map(math.radians, (*a, *b))
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def main(path):
    names = list(REGIONS)
    size = len(names)
    values = np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            km = great_circle_km(REGIONS[names[i]], REGIONS[names[j]])
            values[i, j] = values[j, i] = round(2.0 + 2 * 1.6 * km / 200.0, 1)
    with open(path, "w", newline="") as fh:
        store_matrix(SiteCatalog(names), RttMatrix(values), fh)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/aws15_synthetic.csv")
