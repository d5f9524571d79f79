import random
from fractions import Fraction
from itertools import permutations

from hypothesis import settings

import ultrametry as um

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")


def random_rational(rng: random.Random, max_num: int = 24, max_den: int = 8) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_pool(rng: random.Random, size: int) -> list[Fraction]:
    pool = set()
    while len(pool) < size:
        pool.add(random_rational(rng))
    return sorted(pool)


def seeded_space(seed, n_min=2, n_max=5) -> um.FiniteUltrametricSpace:
    rng = random.Random(um.generators.stable_seed(seed))
    n = rng.randint(n_min, n_max)
    return um.random_space(n, (seed, "space"), random_pool(rng, rng.randint(2, 5)))


def exhaustive_weak_similarities(x, y):
    """Independent oracle: try all n! bijections through the pairwise check."""
    if x.n != y.n:
        return []
    out = []
    for perm in permutations(y.labels):
        phi = um.Bijection(tuple(zip(x.labels, perm)))
        result = um.check_weak_similarity(x, y, phi)
        if isinstance(result, um.ScalingFunction):
            out.append((phi, result))
    return out


def brute_force_verdict(space) -> um.Verdict:
    """Triple-loop oracle written independently of the library validator."""
    m, n = space.dist, space.n
    ok_diag = all(m[i][i] == 0 for i in range(n))
    ok_sym = all(m[i][j] == m[j][i] for i in range(n) for j in range(n))
    ok_tri = all(
        m[i][j] <= max(m[i][k], m[k][j])
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )
    if not (ok_diag and ok_sym and ok_tri):
        return um.Verdict.NOT_PSEUDOULTRAMETRIC
    if any(m[i][j] == 0 for i in range(n) for j in range(n) if i != j):
        return um.Verdict.PSEUDOULTRAMETRIC_ONLY
    return um.Verdict.ULTRAMETRIC
