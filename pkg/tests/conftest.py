import random

from dynbench.generators import gen_er, random_update_sequence


class Scripted:
    """Stand-in rng whose ``random()`` replays fixed values first, then a seeded stream."""

    def __init__(self, values, seed=0):
        self.values = list(values)
        self.rest = random.Random(seed)

    def random(self):
        if self.values:
            return self.values.pop(0)
        return self.rest.random()


def small_random(n, m, rho, seed):
    return random_update_sequence(gen_er(n, m, seed), rho, seed + 7)
