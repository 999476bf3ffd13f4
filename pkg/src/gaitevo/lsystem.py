"""L-system genotypes: grammars, parallel rewriting, and variation operators.

A genotype is a small grammar over the robot alphabet whose rewritten string
is later decoded into a body, plus three controller weights attached to every
module symbol occurring in a rule body.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

# Module symbols
CORE = "C"
BRICK = "B"
ACTIVE_HINGE = "A"
MODULE_SYMBOLS = (CORE, BRICK, ACTIVE_HINGE)

# Mounting commands steering the decoder's cursor
MOUNT_FRONT = "mount-front"
MOUNT_LEFT = "mount-left"
MOUNT_RIGHT = "mount-right"
MOVE_BACK = "move-back-to-parent"
COMMAND_SYMBOLS = (MOUNT_FRONT, MOUNT_LEFT, MOUNT_RIGHT, MOVE_BACK)

ROBOT_SYMBOLS = MODULE_SYMBOLS + COMMAND_SYMBOLS
ROBOT_ALPHABET = frozenset(ROBOT_SYMBOLS)
# Symbols with a production rule, in canonical order.
REPLACEABLE = MODULE_SYMBOLS
# Symbols a variation operator may introduce (never a second core).
_VARIATION_POOL = (BRICK, ACTIVE_HINGE) + COMMAND_SYMBOLS

WEIGHTS_PER_MODULE = 3
MAX_SYMBOLS = 30
REWRITE_ITERATIONS = 3


@dataclass(frozen=True)
class Grammar:
    """Rewriting grammar: alphabet, start symbol, one rule per replaceable symbol."""

    alphabet: frozenset[str]
    axiom: str
    rules: dict[str, tuple[str, ...]]

    def __post_init__(self):
        if self.axiom not in self.alphabet:
            raise ValueError(f"axiom {self.axiom!r} not in alphabet")
        for sym, body in self.rules.items():
            if sym not in self.alphabet:
                raise ValueError(f"rule head {sym!r} not in alphabet")
            for s in body:
                if s not in self.alphabet:
                    raise ValueError(f"rule body symbol {s!r} not in alphabet")


def rewrite(grammar: Grammar, iterations: int, max_symbols: int = MAX_SYMBOLS) -> list[str]:
    """Apply `iterations` parallel rewriting passes to the axiom.

    Every replaceable symbol is substituted simultaneously each pass; symbols
    without a rule copy through.  After each pass the string is truncated on
    the right to `max_symbols`.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    symbols = [grammar.axiom]
    for _ in range(iterations):
        expanded: list[str] = []
        for sym in symbols:
            expanded.extend(grammar.rules.get(sym, (sym,)))
        if len(expanded) > max_symbols:
            log.debug("rewrite truncated %d -> %d symbols", len(expanded), max_symbols)
            expanded = expanded[:max_symbols]
        symbols = expanded
    return symbols


@dataclass
class Gene:
    """One rule-body position: a symbol, with CPG weights if it produces a module."""

    symbol: str
    weights: np.ndarray | None = None

    def copy(self) -> "Gene":
        return Gene(self.symbol, None if self.weights is None else self.weights.copy())


@dataclass
class Genotype:
    """Heritable unit: robot-alphabet rules whose module genes carry 3 weights each."""

    rules: dict[str, list[Gene]] = field(default_factory=dict)
    axiom: str = CORE

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if set(self.rules) != set(REPLACEABLE):
            raise ValueError("genotype must define exactly one rule per module symbol")
        for sym in REPLACEABLE:
            body = self.rules[sym]
            if not body:
                raise ValueError(f"rule for {sym!r} is empty")
            for i, gene in enumerate(body):
                if gene.symbol not in ROBOT_ALPHABET:
                    raise ValueError(f"symbol {gene.symbol!r} not in robot alphabet")
                if gene.symbol == CORE and (sym != CORE or i != 0):
                    raise ValueError("core symbol may only lead the core rule")
                if gene.symbol in MODULE_SYMBOLS:
                    if gene.weights is None or np.shape(gene.weights) != (WEIGHTS_PER_MODULE,):
                        raise ValueError("module gene must carry exactly 3 weights")
                    if not np.all(np.isfinite(gene.weights)):
                        raise ValueError("weights must be finite")
                    if np.any(np.abs(gene.weights) > 1.0):
                        raise ValueError("weights must lie in [-1, 1]")
                elif gene.weights is not None:
                    raise ValueError("command gene must not carry weights")
        if self.rules[CORE][0].symbol != CORE:
            raise ValueError("core rule must start with the core symbol")

    @property
    def grammar(self) -> Grammar:
        return Grammar(
            alphabet=ROBOT_ALPHABET,
            axiom=self.axiom,
            rules={sym: tuple(g.symbol for g in body) for sym, body in self.rules.items()},
        )

    def weight_triples(self) -> list[np.ndarray]:
        """Module-gene weights in canonical occurrence order (rule C, B, A; left to right)."""
        triples = []
        for sym in REPLACEABLE:
            for gene in self.rules[sym]:
                if gene.weights is not None:
                    triples.append(gene.weights)
        return triples

    def copy(self) -> "Genotype":
        return Genotype({sym: [g.copy() for g in body] for sym, body in self.rules.items()}, self.axiom)


def _random_gene(rng: np.random.Generator) -> Gene:
    sym = _VARIATION_POOL[rng.integers(len(_VARIATION_POOL))]
    if sym in MODULE_SYMBOLS:
        return Gene(sym, rng.uniform(-1.0, 1.0, WEIGHTS_PER_MODULE))
    return Gene(sym)


def random_genotype(rng: np.random.Generator) -> Genotype:
    """Fresh genotype: axiom C, rule bodies of 1-4 symbols, weights uniform in [-1, 1].

    The core rule always leads with C so the rewritten string keeps the core
    as its first module.
    """
    rules: dict[str, list[Gene]] = {}
    for sym in REPLACEABLE:
        if sym == CORE:
            body = [Gene(CORE, rng.uniform(-1.0, 1.0, WEIGHTS_PER_MODULE))]
            extra = int(rng.integers(0, 4))
        else:
            body = []
            extra = int(rng.integers(1, 5))
        body.extend(_random_gene(rng) for _ in range(extra))
        rules[sym] = body
    return Genotype(rules)


def crossover(a: Genotype, b: Genotype, rng: np.random.Generator) -> Genotype:
    """Child takes each whole rule body (with its weight genes) from a or b, p=1/2 each."""
    rules = {}
    for sym in REPLACEABLE:
        src = a if rng.random() < 0.5 else b
        rules[sym] = [g.copy() for g in src.rules[sym]]
    return Genotype(rules)


def mutate(
    g: Genotype,
    rng: np.random.Generator,
    rule_p: float = 0.2,
    sigma: float = 0.1,
) -> Genotype:
    """Structural edit per rule with probability `rule_p`; Gaussian noise on all weights.

    Edits are insert / delete / replace of one symbol, chosen uniformly.  The
    core rule's leading C is protected.  Deleting from a one-symbol body is a
    no-op.  Weight noise is clipped back to [-1, 1].
    """
    child = g.copy()
    for sym in REPLACEABLE:
        body = child.rules[sym]
        if rng.random() >= rule_p:
            continue
        protected = 1 if sym == CORE else 0
        op = int(rng.integers(3))
        if op == 0:  # insert
            pos = int(rng.integers(protected, len(body) + 1))
            body.insert(pos, _random_gene(rng))
        elif op == 1:  # delete
            if len(body) > max(1, protected):
                pos = int(rng.integers(protected, len(body)))
                del body[pos]
        else:  # replace
            if len(body) > protected:
                pos = int(rng.integers(protected, len(body)))
                body[pos] = _random_gene(rng)
    for sym in REPLACEABLE:
        for gene in child.rules[sym]:
            if gene.weights is not None:
                noise = rng.normal(0.0, sigma, WEIGHTS_PER_MODULE) if sigma > 0 else 0.0
                gene.weights = np.clip(gene.weights + noise, -1.0, 1.0)
    return child


def format_genotype(g: Genotype) -> str:
    """Line-oriented text form; weights printed to 6 decimal places."""
    lines = [f"axiom: {g.axiom}"]
    for sym in REPLACEABLE:
        lines.append(f"rule {sym}: " + " ".join(gene.symbol for gene in g.rules[sym]))
    idx = 0
    for sym in REPLACEABLE:
        for gene in g.rules[sym]:
            if gene.weights is not None:
                w = gene.weights
                lines.append(f"weights {idx}: {w[0]:.6f} {w[1]:.6f} {w[2]:.6f}")
                idx += 1
    return "\n".join(lines) + "\n"


def parse_genotype(text: str) -> Genotype:
    """Inverse of format_genotype; round-trips losslessly at 6 decimal places."""
    axiom = CORE
    bodies: dict[str, list[str]] = {}
    weights: list[np.ndarray] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "axiom":
            axiom = rest
        elif key.startswith("rule "):
            bodies[key[5:].strip()] = rest.split() if rest else []
        elif key.startswith("weights "):
            weights.append(np.array([float(v) for v in rest.split()]))
        else:
            raise ValueError(f"unrecognized genotype line: {raw!r}")
    rules: dict[str, list[Gene]] = {}
    idx = 0
    for sym in REPLACEABLE:
        if sym not in bodies:
            raise ValueError(f"missing rule for {sym!r}")
        genes = []
        for s in bodies[sym]:
            if s in MODULE_SYMBOLS:
                if idx >= len(weights):
                    raise ValueError("missing weights for module occurrence")
                genes.append(Gene(s, weights[idx]))
                idx += 1
            else:
                genes.append(Gene(s))
        rules[sym] = genes
    if idx != len(weights):
        raise ValueError("more weight lines than module occurrences")
    return Genotype(rules, axiom)
