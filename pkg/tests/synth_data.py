"""Deterministic synthetic 2-D datasets for clustering tests.

Each generator takes a seeded Generator and a size; DATASETS pins the seed
and a working bandwidth for the flat-weight truncated kernel on the
standardized data.
"""

import numpy as np


def two_blobs(rng, n):
    half = n // 2
    a = rng.normal([-2.0, 0.0], 0.35, size=(half, 2))
    b = rng.normal([2.0, 0.5], 0.35, size=(n - half, 2))
    return np.vstack([a, b])


def moons(rng, n):
    half = n // 2
    t1 = rng.uniform(0, np.pi, half)
    t2 = rng.uniform(0, np.pi, n - half)
    upper = np.column_stack([np.cos(t1), np.sin(t1)])
    lower = np.column_stack([1 - np.cos(t2), 0.5 - np.sin(t2)])
    pts = np.vstack([upper, lower])
    return pts + rng.normal(0, 0.06, size=pts.shape)


def circles(rng, n):
    half = n // 2
    t1 = rng.uniform(0, 2 * np.pi, half)
    t2 = rng.uniform(0, 2 * np.pi, n - half)
    outer = np.column_stack([np.cos(t1), np.sin(t1)])
    inner = 0.45 * np.column_stack([np.cos(t2), np.sin(t2)])
    pts = np.vstack([outer, inner])
    return pts + rng.normal(0, 0.04, size=pts.shape)


def aniso(rng, n):
    pts = rng.normal(0, 1, size=(n, 2))
    third = n // 3
    pts[:third] += [-4, 0]
    pts[third:2 * third] += [4, 1]
    pts[2 * third:] += [0, 5]
    return pts @ np.array([[0.6, -0.6], [-0.35, 0.85]])


def varied(rng, n):
    third = n // 3
    a = rng.normal([-3, 0], 0.4, size=(third, 2))
    b = rng.normal([3, 0], 1.2, size=(third, 2))
    c = rng.normal([0, 4], 0.7, size=(n - 2 * third, 2))
    return np.vstack([a, b, c])


def uniform_square(rng, n):
    return rng.uniform(-1, 1, size=(n, 2))


# name -> (generator, seed, bandwidth on standardized data)
DATASETS = {
    "two_blobs": (two_blobs, 101, 0.8),
    "moons": (moons, 102, 0.8),
    "circles": (circles, 103, 0.5),
    "aniso": (aniso, 104, 0.3),
    "varied": (varied, 105, 0.8),
    "uniform": (uniform_square, 106, 0.5),
}


def make_dataset(name, n=500):
    gen, seed, h = DATASETS[name]
    return gen(np.random.default_rng(seed), n), h
