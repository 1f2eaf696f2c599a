import random
from fractions import Fraction

from novikov_barcodes.coefficients import CyclotomicRational, ExponentGroup, NovikovScalar
from novikov_barcodes.filtered_linalg import FilteredMap, FilteredSpace, filtration_of

GAMMA_ONE = ExponentGroup([1])


def random_scalar(rng: random.Random, prime: int, gamma: ExponentGroup, terms: int = 2) -> NovikovScalar:
    out = []
    for _ in range(rng.randint(1, terms)):
        coords = [Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2])) for _ in range(prime - 1)]
        if not any(coords):
            coords[0] = Fraction(1)
        e = 0 if gamma.is_trivial else rng.randint(-1, 3)
        out.append((e, CyclotomicRational(prime, coords)))
    return NovikovScalar(prime, out, gamma)


def random_space(rng: random.Random, n: int, prime: int, gamma: ExponentGroup, name: str = "e") -> FilteredSpace:
    filts = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
    return FilteredSpace([f"{name}{i}" for i in range(n)], filts, gamma, prime)


def random_map(seed: int, prime: int = 2, gamma: ExponentGroup | None = None, max_dim: int = 8) -> FilteredMap:
    """Sparse random map, sometimes with repeated or proportional columns to force rank drops."""
    rng = random.Random(seed)
    gamma = gamma or ExponentGroup.trivial()
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    dom = random_space(rng, n, prime, gamma, "v")
    cod = random_space(rng, m, prime, gamma, "w")
    density = rng.choice([0.2, 0.4, 0.7])
    cols = []
    for j in range(n):
        if cols and rng.random() < 0.2:
            src = rng.choice(cols)
            c = random_scalar(rng, prime, gamma, 1)
            cols.append({i: c * s for i, s in src.items()})
            continue
        cols.append({i: random_scalar(rng, prime, gamma) for i in range(m) if rng.random() < density})
    return FilteredMap(dom, cod, cols)


def random_family(seed: int, prime: int = 2, gamma: ExponentGroup | None = None) -> tuple:
    """A space and a family of nonzero vectors, dependent at the zero level about half the time."""
    rng = random.Random(seed)
    gamma = gamma or ExponentGroup.trivial()
    n = rng.randint(1, 6)
    space = random_space(rng, n, prime, gamma)
    k = rng.randint(1, n)
    vecs = []
    for _ in range(k):
        if vecs and rng.random() < 0.35:
            # same leading data as an earlier vector plus lower noise
            v = dict(rng.choice(vecs))
        else:
            v = {}
            for i in range(n):
                if rng.random() < 0.6:
                    v[i] = random_scalar(rng, prime, gamma, 1)
            if not v:
                v[rng.randrange(n)] = NovikovScalar.one(prime, gamma)
        vecs.append(v)
    return space, vecs


def lower_noise(rng, space, v, gamma):
    """Add a term strictly below ``l(v)``."""
    top = filtration_of(space, v)
    out = dict(v)
    i = rng.randrange(space.dim)
    gap = space.filtrations[i] - top
    e = max(0, int(gap) + 1) if gap >= 0 else 0
    if gamma.is_trivial and gap >= 0:
        return out
    coeff = random_scalar(rng, space.prime, gamma, 1).terms[0][1]
    s = NovikovScalar(space.prime, [(e, coeff)], gamma)
    if space.filtrations[i] - s.valuation >= top:
        return out
    out[i] = out[i] + s if i in out else s
    if not out[i]:
        del out[i]
    return out
