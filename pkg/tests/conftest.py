import random
import string

from currdyn.subst import Substitution, _is_primitive, transition_matrix


def random_primitive_substitution(rng: random.Random, max_letters: int = 5,
                                  max_image: int = 4) -> Substitution:
    """A seeded random substitution with a primitive transition matrix."""
    while True:
        n = rng.randint(2, max_letters)
        alphabet = list(string.ascii_lowercase[:n])
        rule = {a: tuple(rng.choice(alphabet)
                         for _ in range(rng.randint(1, max_image)))
                for a in alphabet}
        s = Substitution(rule)
        mat = transition_matrix(s)
        if _is_primitive(mat):
            return s
