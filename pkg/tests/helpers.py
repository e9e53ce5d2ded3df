"""Shared test helpers."""

import numpy as np

from cmop.harness import gen_instance, instance_from_document


def make_instance(seed, m=10, n=5, k=8, rng_range=10.0, eta=2.0):
    """Deterministic test instance drawn through the package generator."""
    return instance_from_document(
        gen_instance(m=m, n=n, k=k, rng_range=rng_range, eta=eta, seed=seed)
    )


def random_w(rng, n=5, k=8, scale=2.0):
    return rng.uniform(-scale, scale, (n, k)) + 1j * rng.uniform(-scale, scale, (n, k))


def zero_w(instance):
    return np.zeros((instance.n, instance.k), dtype=np.complex128)
