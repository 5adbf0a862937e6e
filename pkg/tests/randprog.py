"""Random ground programs shared by the property and acceptance tests."""
import random

from caspr.terms import Atom, BodyLiteral, Literal, Program, Rule

BODY_SIZES = (0, 0, 1, 1, 2, 2, 3)


def random_program(rng: random.Random, max_atoms=8, max_rules=12, p_neg=0.25, p_naf=0.4):
    atoms = [Atom(f"a{i}") for i in range(rng.randint(1, max_atoms))]

    def lit():
        return Literal(rng.choice(atoms), rng.random() < p_neg)

    rules = []
    for _ in range(rng.randint(1, max_rules)):
        body = tuple(BodyLiteral(lit(), rng.random() < p_naf) for _ in range(rng.choice(BODY_SIZES)))
        rules.append(Rule(lit(), body))
    return Program(tuple(rules)), atoms


def random_stratified(rng: random.Random, max_atoms=8, max_rules=12, p_neg=0.1, p_naf=0.4):
    """Atoms get levels; naf only looks strictly down, positive literals not up."""
    n = rng.randint(1, max_atoms)
    atoms = [Atom(f"a{i}") for i in range(n)]
    level = {a: rng.randint(0, 3) for a in atoms}
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        body = []
        for _ in range(rng.choice(BODY_SIZES)):
            naf = rng.random() < p_naf
            pool = [a for a in atoms if (level[a] < level[head] if naf else level[a] <= level[head])]
            if not pool:
                continue
            body.append(BodyLiteral(Literal(rng.choice(pool), rng.random() < p_neg), naf))
        rules.append(Rule(Literal(head, rng.random() < p_neg), tuple(body)))
    return Program(tuple(rules)), atoms


def queried_literals(atoms):
    for a in atoms:
        yield Literal(a)
        yield Literal(a, True)
