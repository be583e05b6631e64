"""First-order sentences over the full-clone signature.

Grammar::

    formula := quant | disj
    quant   := ("forall" | "exists") VAR "." formula
    disj    := conj ("|" conj)*
    conj    := unit ("&" unit)*
    unit    := "!" unit | "(" formula ")" | term "=" term
    term    := VAR | "c" NAT | IDENT "(" term ("," term)* ")"

Constants ``c<a>`` name the elements of the base set; table symbols are
looked up in a :class:`SymbolRegistry`.  Evaluation broadcasts one array
axis per quantifier, so a sentence of depth ``d`` costs ``|L|^d``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import AlgebraError, Homomorphism, VarietyAlgebra
from .tables import FunctionTable

DEFAULT_DEPTH = 2
MAX_EVAL_CELLS = 1 << 24


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos
        self.text = text


# -- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple


Term = Union[Var, Const, App]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Eq, Not, And, Or, Forall, Exists]


def implies(a: Formula, b: Formula) -> Formula:
    """``a -> b``, written as ``!a | b`` (the grammar has no arrow)."""
    return Or((Not(a), b))


def depth(phi: Formula) -> int:
    """Quantifier depth."""
    if isinstance(phi, (Forall, Exists)):
        return 1 + depth(phi.body)
    if isinstance(phi, Not):
        return depth(phi.body)
    if isinstance(phi, (And, Or)):
        return max(depth(p) for p in phi.parts)
    return 0


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(term_vars(a) for a in t.args))
    return set()


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return set().union(*(free_vars(p) for p in phi.parts))
    return free_vars(phi.body) - {phi.var}


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


# -- symbols --------------------------------------------------------------------

class SymbolRegistry:
    """Named tables over one base set; constants are implicit (``c0`` .. ``c{base-1}``)."""

    def __init__(self, base: int, tables: dict[str, FunctionTable] | None = None):
        self.base = base
        self.tables: dict[str, FunctionTable] = {}
        for name, t in (tables or {}).items():
            self.register(name, t)

    def register(self, name: str, table: FunctionTable) -> None:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("forall", "exists"):
            raise FormulaError(f"bad table name {name!r}")
        if re.fullmatch(r"c\d+", name):
            raise FormulaError(f"{name!r} clashes with constant names")
        if table.base != self.base:
            raise FormulaError("table over a different base")
        if name in self.tables and self.tables[name] != table:
            raise FormulaError(f"{name!r} already registered")
        self.tables[name] = table

    def arity(self, name: str) -> int:
        return self.tables[name].arity

    def __contains__(self, name: str) -> bool:
        return name in self.tables

    def to_json(self) -> dict:
        return {"base": self.base, "tables": {k: t.to_json() for k, t in self.tables.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "SymbolRegistry":
        base = data["base"]
        return cls(base, {k: FunctionTable.from_json(base, v) for k, v in data.get("tables", {}).items()})


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)|(?P<sym>[().,=|&!]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, registry: SymbolRegistry | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, found {got}", tok[2], self.text)
        self.i += 1
        return tok

    def formula(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "word" and val in ("forall", "exists"):
            self.i += 1
            var = self.var()
            self.take(".")
            body = self.formula()
            return Forall(var, body) if val == "forall" else Exists(var, body)
        return self.disj()

    def var(self) -> str:
        kind, val, pos = self.take(kind="word")
        if not re.fullmatch(r"[a-z][a-z0-9]*", val) or val in ("forall", "exists") or re.fullmatch(r"c\d+", val):
            raise ParseError(f"{val!r} is not a variable", pos, self.text)
        return val

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[1] == "|":
            self.i += 1
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unit()]
        while self.peek()[1] == "&":
            self.i += 1
            parts.append(self.unit())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unit(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "!":
            self.i += 1
            return Not(self.unit())
        if val == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return inner
        left = self.term()
        self.take("=")
        return Eq(left, self.term())

    def term(self) -> Term:
        kind, val, pos = self.peek()
        if kind != "word":
            raise ParseError(f"expected a term, found {val!r}" if kind != "end" else "expected a term, found end of input",
                             pos, self.text)
        if self.peek(1)[1] == "(":
            self.i += 2
            args = [self.term()]
            while self.peek()[1] == ",":
                self.i += 1
                args.append(self.term())
            self.take(")")
            if self.registry is not None:
                if val not in self.registry:
                    raise ParseError(f"unknown symbol {val!r}", pos, self.text)
                if self.registry.arity(val) != len(args):
                    raise ParseError(f"{val!r} takes {self.registry.arity(val)} arguments, given {len(args)}",
                                     pos, self.text)
            return App(val, tuple(args))
        m = re.fullmatch(r"c(\d+)", val)
        if m:
            self.i += 1
            a = int(m.group(1))
            if self.registry is not None and a >= self.registry.base:
                raise ParseError(f"constant {val} outside the base set", pos, self.text)
            return Const(a)
        return Var(self.var())


def parse_formula(text: str, registry: SymbolRegistry | None = None) -> Formula:
    p = _Parser(text, registry)
    phi = p.formula()
    p.take(kind="end")
    return phi


def parse_term(text: str, registry: SymbolRegistry | None = None) -> Term:
    p = _Parser(text, registry)
    t = p.term()
    p.take(kind="end")
    return t


# -- printer --------------------------------------------------------------------

def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return f"c{t.value}"
    return f"{t.symbol}({', '.join(print_term(a) for a in t.args)})"


def print_formula(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, (Forall, Exists)):
        q = "forall" if isinstance(phi, Forall) else "exists"
        return f"{q} {phi.var}. {print_formula(phi.body)}"
    if isinstance(phi, Not):
        inner = print_formula(phi.body)
        return "!" + (inner if isinstance(phi.body, Not) else f"({inner})")
    if isinstance(phi, And):
        return " & ".join(_wrap(p, (Eq, Not)) for p in phi.parts)
    if isinstance(phi, Or):
        return " | ".join(_wrap(p, (Eq, Not, And)) for p in phi.parts)
    raise FormulaError(f"not a formula: {phi!r}")


def _wrap(phi: Formula, bare) -> str:
    s = print_formula(phi)
    return s if isinstance(phi, bare) else f"({s})"


# -- evaluation -----------------------------------------------------------------

def _axis(values, level: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[level] = -1
    return np.asarray(values).reshape(shape)


class Evaluator:
    """Vectorised model checker for one algebra and registry."""

    def __init__(self, alg: VarietyAlgebra, registry: SymbolRegistry):
        if registry.base != alg.base:
            raise FormulaError("registry over a different base")
        self.alg = alg
        self.registry = registry

    def term(self, t: Term, scope: dict, ndim: int) -> np.ndarray:
        if isinstance(t, Var):
            if t.name not in scope:
                raise FormulaError(f"unbound variable {t.name!r}")
            where = scope[t.name]
            if where[0] == "param":
                return np.full((1,) * ndim, where[1], dtype=np.int64)
            return _axis(np.arange(self.alg.size), where[1], ndim)
        if isinstance(t, Const):
            if not 0 <= t.value < self.alg.base:
                raise FormulaError(f"constant c{t.value} outside the base set")
            return np.full((1,) * ndim, self.alg.constant(t.value), dtype=np.int64)
        if t.symbol not in self.registry:
            raise FormulaError(f"unknown symbol {t.symbol!r}")
        table = self.registry.tables[t.symbol]
        if table.arity != len(t.args):
            raise FormulaError(f"{t.symbol!r} takes {table.arity} arguments, given {len(t.args)}")
        args = np.broadcast_arrays(*[self.term(a, scope, ndim) for a in t.args])
        shape = args[0].shape
        flat = np.stack([a.reshape(-1) for a in args])
        # evaluate each distinct argument tuple once
        uniq, inv = np.unique(flat, axis=1, return_inverse=True)
        vals = self.alg.apply_batch(table.array, uniq)[0]
        return vals[inv.reshape(-1)].reshape(shape)

    def formula(self, phi: Formula, scope: dict, ndim: int) -> np.ndarray:
        if isinstance(phi, Eq):
            l, r = self.term(phi.left, scope, ndim), self.term(phi.right, scope, ndim)
            return np.asarray(l == r).reshape(np.broadcast_shapes(l.shape, r.shape))
        if isinstance(phi, Not):
            return ~self.formula(phi.body, scope, ndim)
        if isinstance(phi, And):
            out = self.formula(phi.parts[0], scope, ndim)
            for p in phi.parts[1:]:
                out = out & self.formula(p, scope, ndim)
            return out
        if isinstance(phi, Or):
            out = self.formula(phi.parts[0], scope, ndim)
            for p in phi.parts[1:]:
                out = out | self.formula(p, scope, ndim)
            return out
        if self.alg.size ** (ndim + 1) > MAX_EVAL_CELLS:
            raise FormulaError("quantifier nesting too deep for this carrier")
        inner = dict(scope)
        inner[phi.var] = ("bound", ndim)
        body = self.formula(phi.body, inner, ndim + 1)
        body = np.broadcast_to(body, body.shape[:ndim] + (self.alg.size,) + body.shape[ndim + 1:])
        red = body.all(axis=ndim) if isinstance(phi, Forall) else body.any(axis=ndim)
        return red.reshape(red.shape[:ndim])

    def holds(self, phi: Formula, env: dict | None = None) -> bool:
        env = env or {}
        missing = free_vars(phi) - set(env)
        if missing:
            raise FormulaError(f"free variables {sorted(missing)}")
        scope = {k: ("param", int(v)) for k, v in env.items()}
        return bool(self.formula(phi, scope, 0))


def eval_term(alg: VarietyAlgebra, term: Term, env: dict, registry: SymbolRegistry) -> int:
    ev = Evaluator(alg, registry)
    scope = {k: ("param", int(v)) for k, v in env.items()}
    return int(ev.term(term, scope, 0).reshape(-1)[0])


def eval_formula(alg: VarietyAlgebra, phi: Formula | str, registry: SymbolRegistry, env: dict | None = None) -> bool:
    if isinstance(phi, str):
        phi = parse_formula(phi, registry)
    return Evaluator(alg, registry).holds(phi, env)


# -- corpora --------------------------------------------------------------------

def cardinality_sentence(base: int) -> Formula:
    """Every element is named by a constant."""
    eqs = tuple(Eq(Var("x"), Const(a)) for a in range(base))
    return Forall("x", Or(eqs) if base > 1 else eqs[0])


def two_value_table(base: int, a: int = 0, b: int = 1) -> FunctionTable:
    """A unary ``i`` with image ``{a, b}``, ``i(a) = a`` and ``i(b) = b``."""
    return FunctionTable(base, 1, tuple(a if x == a else b for x in range(base)))


def two_value_sentence(sym: str = "op_i", a: int = 0, b: int = 1) -> Formula:
    x = Var("x")
    return Forall("x", Or((Eq(App(sym, (x,)), Const(a)), Eq(App(sym, (x,)), Const(b)))))


@dataclass
class Corpus:
    seed: int
    depth: int
    registry: SymbolRegistry
    sentences: list

    def texts(self) -> list[str]:
        return [print_formula(s) for s in self.sentences]

    def to_json(self) -> dict:
        return {"seed": self.seed, "depth": self.depth, "registry": self.registry.to_json(), "sentences": self.texts()}

    @classmethod
    def from_json(cls, data: dict) -> "Corpus":
        reg = SymbolRegistry.from_json(data["registry"])
        return cls(data.get("seed", 0), data.get("depth", DEFAULT_DEPTH), reg,
                   [parse_formula(s, reg) for s in data["sentences"]])


def standard_registry(base: int, seed: int = 0, unary: int = 3, binary: int = 3) -> SymbolRegistry:
    """``op_i`` (two-valued retraction) plus seeded random unary/binary tables."""
    rng = np.random.default_rng(seed)
    reg = SymbolRegistry(base)
    if base > 1:
        reg.register("op_i", two_value_table(base))
    for k in range(unary):
        reg.register(f"op_u{k}", FunctionTable(base, 1, tuple(int(v) for v in rng.integers(0, base, base))))
    for k in range(binary):
        reg.register(f"op_b{k}", FunctionTable(base, 2, tuple(int(v) for v in rng.integers(0, base, base * base))))
    return reg


class _Gen:
    def __init__(self, rng, registry: SymbolRegistry):
        self.rng = rng
        self.reg = registry
        self.syms = sorted(registry.tables)

    def term(self, vars_: list[str], budget: int) -> Term:
        r = self.rng.random()
        if budget <= 0 or r < 0.45 or not self.syms:
            if vars_ and self.rng.random() < 0.7:
                return Var(vars_[self.rng.integers(len(vars_))])
            return Const(int(self.rng.integers(self.reg.base)))
        sym = self.syms[self.rng.integers(len(self.syms))]
        return App(sym, tuple(self.term(vars_, budget - 1) for _ in range(self.reg.arity(sym))))

    def formula(self, vars_: list[str], quants: int, size: int) -> Formula:
        r = self.rng.random()
        if quants > 0 and (r < 0.5 or not vars_):
            v = f"x{len(vars_)}"
            body = self.formula(vars_ + [v], quants - 1, size)
            return Forall(v, body) if self.rng.random() < 0.5 else Exists(v, body)
        if size <= 0 or r < 0.7:
            return Eq(self.term(vars_, 2), self.term(vars_, 2))
        if r < 0.8:
            return Not(self.formula(vars_, quants, size - 1))
        cls = And if r < 0.9 else Or
        return cls((self.formula(vars_, quants, size - 1), self.formula(vars_, quants, size - 1)))

    def sentence(self, max_depth: int) -> Formula:
        quants = int(self.rng.integers(0, max_depth + 1))
        phi = self.formula([], quants, 2)
        # close any variables left free by the shape
        for v in sorted(free_vars(phi), reverse=True):
            phi = Forall(v, phi) if self.rng.random() < 0.5 else Exists(v, phi)
        return phi


def generate_corpus(base: int, count: int = 100, depth_cap: int = DEFAULT_DEPTH, seed: int = 0,
                    registry: SymbolRegistry | None = None) -> Corpus:
    """Seeded sentences of quantifier depth at most ``depth_cap``.

    The first entries are fixed: ``c0 = c0``, the sentence saying every
    element is a constant, and ``forall x. op_i(x) = c0 | op_i(x) = c1``.
    """
    registry = registry or standard_registry(base, seed)
    fixed = [Eq(Const(0), Const(0)), cardinality_sentence(base)]
    if base > 1 and "op_i" in registry:
        fixed.append(two_value_sentence())
    fixed = [s for s in fixed if depth(s) <= depth_cap]
    rng = np.random.default_rng(seed)
    gen = _Gen(rng, registry)
    out = list(fixed[:count])
    seen = {print_formula(s) for s in out}
    tries = 0
    while len(out) < count:
        phi = gen.sentence(depth_cap)
        tries += 1
        text = print_formula(phi)
        if depth(phi) <= depth_cap and (text not in seen or tries > 50 * count):
            seen.add(text)
            out.append(phi)
    return Corpus(seed, depth_cap, registry, out)


# -- transfer -------------------------------------------------------------------

def transfer_report(alg: VarietyAlgebra, corpus: Corpus, reference: VarietyAlgebra | None = None) -> dict:
    """Truth of each sentence in ``alg`` and in the full clone (or ``reference``)."""
    from .algebra import omega

    reference = reference or omega(alg.base)
    ea, er = Evaluator(alg, corpus.registry), Evaluator(reference, corpus.registry)
    cases = []
    for phi in corpus.sentences:
        a, r = ea.holds(phi), er.holds(phi)
        cases.append({"sentence": print_formula(phi), "power": a, "base": r, "transfers": a == r})
    failures = [c["sentence"] for c in cases if not c["transfers"]]
    return {"seed": corpus.seed, "depth": corpus.depth, "count": len(cases), "failures": failures,
            "ok": not failures, "cases": cases}


def los_check(lrp, corpus: Corpus) -> dict:
    """Each sentence holds in the limit ultrapower iff it holds in the full clone."""
    if not getattr(lrp, "ultra", False):
        raise FormulaError("Łoś transfer is only claimed for limit ultrapowers")
    return transfer_report(lrp, corpus)


def _parametric(corpus: Corpus, count: int, seed: int) -> list[Formula]:
    """Formulas with one free parameter ``p``, from the corpus generator."""
    rng = np.random.default_rng(seed)
    gen = _Gen(rng, corpus.registry)
    out = []
    while len(out) < count:
        q = int(rng.integers(0, corpus.depth + 1))
        phi = gen.formula(["p"], q, 2)
        if free_vars(phi) <= {"p"} and depth(phi) <= corpus.depth:
            out.append(phi)
    return out


def is_elementary_embedding(e: Homomorphism, depth_cap: int = DEFAULT_DEPTH, corpus: Corpus | None = None,
                            seed: int = 0, report: dict | None = None) -> bool:
    """At finite scale with every element of ``A`` named: elementary iff ``e`` is an isomorphism.

    The answer is cross-checked on a corpus, with parameters: if ``e`` is an
    isomorphism every sentence must transfer, and if not the counting
    sentence must fail in the target.
    """
    src, tgt = e.source, e.target
    if src.size != src.base or not np.array_equal(src.constants, np.arange(src.base)):
        raise AlgebraError("source must be the full clone on the base set")
    corpus = corpus or generate_corpus(src.base, 40, depth_cap, seed)
    iso = e.injective and e.surjective and e.is_homomorphism()
    es, et = Evaluator(src, corpus.registry), Evaluator(tgt, corpus.registry)
    failures = []
    for phi in corpus.sentences:
        if es.holds(phi) != et.holds(phi):
            failures.append(print_formula(phi))
    for phi in _parametric(corpus, 20, seed):
        for a in range(src.size):
            if es.holds(phi, {"p": a}) != et.holds(phi, {"p": int(e.mapping[a])}):
                failures.append(f"{print_formula(phi)} at p = c{a}")
    if iso and failures:
        raise AlgebraError(f"isomorphism fails to transfer: {failures[0]}")
    if not iso and et.holds(cardinality_sentence(src.base)) and e.injective:
        raise AlgebraError("target satisfies the counting sentence but e is not onto")
    if report is not None:
        report.update({"isomorphism": iso, "seed": corpus.seed, "depth": corpus.depth,
                       "checked": len(corpus.sentences), "non_transferring": failures[:10]})
    return iso
