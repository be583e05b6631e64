"""Executable checks of the main correspondences.

Every suite returns a JSON-ready report with the seed, caps, counts,
per-case verdicts, the number of failures and ``ok``.
"""
from __future__ import annotations

import time
from itertools import product

import numpy as np

from . import kernels
from .algebra import (
    AlgebraError,
    Homomorphism,
    VarietyAlgebra,
    canonical_embedding,
    classify,
    congruence_lattice,
    congruences_permute,
    direct_product,
    enumerate_homomorphisms,
    factor_pairs,
    factorization_map,
    generate_subalgebra,
    minimal_generating_set,
    omega,
    quotient_algebra,
    trivial_algebra,
)
from .clone import (
    ClonePower,
    FreeQuotient,
    GeneratorAssignment,
    congruence_to_Zfilter,
    free_algebra,
    full_power,
    limit_reduced_power,
    phi_alpha,
    subalgebra_to_filter,
    Zfilter_to_congruence,
)
from .logic import generate_corpus, is_elementary_embedding, los_check, transfer_report, two_value_sentence
from .partitions import (
    SetPartition,
    all_filters,
    ba_filters,
    block_boolean_algebra,
    members_of,
)
from .tables import standard_tables
from .uniform import (
    DirectedSystem,
    UniformMap,
    connecting_map,
    directed_colimit,
    induced_map,
    pullback_hom,
    z_transfer_holds,
    _zalpha,
)


def _report(suite: str, cases: list, started: float, **extra) -> dict:
    failures = [c for c in cases if not c.get("ok", False)]
    out = {"suite": suite, "backend": kernels.BACKEND, "count": len(cases), "failures": len(failures),
           "ok": not failures, "seconds": round(time.perf_counter() - started, 3)}
    out.update(extra)
    out["cases"] = cases
    return out


# -- subalgebras and kernel filters ---------------------------------------------

def verify_thm1(base: int = 4, index: int = 3, trials: int = 200, seed: int = 0) -> dict:
    """Random generated subalgebras ``B`` of ``Ω(A)^I`` satisfy ``B = {f | Π(f) in F_B}``."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    power = full_power(base, index)
    tables = standard_tables(base)
    cases = []
    for trial in range(trials):
        seeds = sorted(set(rng.integers(0, power.size, int(rng.integers(1, 3))).tolist()))
        B = generate_subalgebra(power, seeds, tables)
        case = {"trial": trial, "seeds": [list(power.element(s)) for s in seeds], "size": int(len(B))}
        try:
            F = subalgebra_to_filter(power, B, tables)
            rebuilt = [k for k in range(power.size) if F.base <= SetPartition(power.element(k))]
            case["filter_base"] = F.base.to_json()
            case["ok"] = rebuilt == B.tolist()
        except AlgebraError as exc:
            case.update(ok=False, error=str(exc))
        cases.append(case)
    return _report("thm1", cases, t0, seed=seed, base=base, index=index, tables=tables.describe())


# -- the block Boolean algebra ------------------------------------------------

def verify_ba(max_index: int = 4) -> dict:
    t0 = time.perf_counter()
    cases = []
    for n in range(1, max_index + 1):
        for F in all_filters(n):
            case = {"index": n, "filter": F.to_json()}
            try:
                ba = block_boolean_algebra(F)
                els = set(ba.elements)
                top = (1 << n) - 1
                case["size"] = len(els)
                case["ok"] = (0 in els and top in els
                              and all(top & ~r in els for r in els)
                              and all(r & s in els and r | s in els for r in els for s in els))
            except ValueError as exc:
                case.update(ok=False, error=str(exc))
            cases.append(case)
    return _report("ba", cases, t0, max_index=max_index)


# -- congruences and block filters ----------------------------------------------

def verify_thm2(base: int = 3, index: int = 3) -> dict:
    """Con(Ω(A)^F) and the filters of the block algebra, for every F."""
    t0 = time.perf_counter()
    tables = standard_tables(base)
    cases = []
    for F in all_filters(index):
        cp = ClonePower(base, F)
        cons = congruence_lattice(cp, tables)
        zs = ba_filters(cp.ba)
        fwd = [congruence_to_Zfilter(cp, th) for th in cons]
        back = [Zfilter_to_congruence(cp, Z) for Z in zs]
        bij = len(cons) == len(zs) and set(fwd) == set(zs)
        round1 = all(Zfilter_to_congruence(cp, Z) == th for th, Z in zip(cons, fwd))
        round2 = all(congruence_to_Zfilter(cp, th) == Z for th, Z in zip(back, zs))
        order = all((a <= b) == (za <= zb) for a, za in zip(cons, fwd) for b, zb in zip(cons, fwd))
        permutes = congruences_permute(cp, cons)
        cases.append({"filter": F.to_json(), "size": cp.size, "congruences": len(cons), "filters": len(zs),
                      "bijective": bij, "round_trips": round1 and round2, "order": order, "permutable": permutes,
                      "ok": bij and round1 and round2 and order and permutes})
    return _report("thm2", cases, t0, base=base, index=index, tables=tables.describe())


# -- simplicity and elementary embeddings -------------------------------------

def verify_thm3(base: int = 3, index: int = 3, depth: int = 2, corpus_size: int = 100, seed: int = 0) -> dict:
    """For every ``(F, Z)`` with at least two classes, the five conditions agree."""
    t0 = time.perf_counter()
    tables = standard_tables(base)
    corpus = generate_corpus(base, corpus_size, depth, seed)
    cases = []
    for F in all_filters(index):
        cp = ClonePower(base, F)
        for Z in ba_filters(cp.ba):
            L = limit_reduced_power(cp, Z)
            if L.size < 2:
                continue
            cons = congruence_lattice(L, tables)
            flags = classify(L, tables, cons)
            info: dict = {}
            elem = is_elementary_embedding(canonical_embedding(L, tables), depth, corpus, report=info)
            pairs = factor_pairs(cons)
            factors_ok = True
            for th1, th2 in pairs[:1]:
                h = factorization_map(L, th1, th2, tables)
                factors_ok = h.is_isomorphism(tables)
            verdicts = [flags["simple"], flags["subdirectly_irreducible"], flags["directly_indecomposable"],
                        elem, Z.ultra]
            permutes = congruences_permute(L, cons)
            cases.append({"filter": F.to_json(), "Z": members_of(Z.generator), "size": L.size, **flags,
                          "elementary": elem, "ultra": Z.ultra, "permutable": permutes,
                          "factorization": factors_ok, "non_transferring": info.get("non_transferring", [])[:2],
                          "ok": len(set(verdicts)) == 1 and permutes and factors_ok})
    return _report("thm3", cases, t0, base=base, index=index, depth=depth, seed=seed, corpus=len(corpus.sentences))


# -- freeness --------------------------------------------------------------------

def target_catalog(base: int, max_size: int) -> list[VarietyAlgebra]:
    """Algebras from each construction here with carrier at most ``max_size``.

    Omega, the one-element quotient, every clone power on up to four
    indices, products, limit reduced powers of the full powers on up to
    three indices, free algebras and some of their quotients.
    """
    out: list[VarietyAlgebra] = [omega(base), trivial_algebra(base)]
    O = omega(base)
    for n in range(1, 5):
        if base ** n > max_size * base ** 2:
            break
        for F in all_filters(n):
            if base ** len(F.base) <= max_size:
                out.append(ClonePower(base, F))
    prods = [direct_product(O, O)]
    prods.append(direct_product(prods[0], O))
    prods.append(direct_product(prods[0], prods[0]))
    out += [p for p in prods if p.size <= max_size]
    for n in range(1, 4):
        if base ** n > max_size:
            break
        cp = full_power(base, n)
        for Z in ba_filters(cp.ba):
            if Z.generator and Z.generator != cp.ba.top:
                out.append(limit_reduced_power(cp, Z))
    for g in (1, 2):
        fr = free_algebra(base, g)
        if fr.size <= max_size:
            out.append(fr.algebra)
        if fr.npoints <= 9:
            for M in (1, (1 << fr.npoints) - 2, 0b11):
                if M < (1 << fr.npoints) and base ** bin(M).count("1") <= max_size:
                    out.append(FreeQuotient(fr, M))
    cp = full_power(base, 2)
    cons = congruence_lattice(cp)
    out.append(quotient_algebra(cp, cons[1]))
    return [a for a in out if a.size <= max_size]


def verify_free(base: int = 2, gens=(1, 2), max_size: int = 16, oracle=None) -> dict:
    """φ_α exists, is a homomorphism and is the only one extending α.

    Uniqueness uses ``enumerate_homomorphisms`` unless an ``oracle``
    ``(source, target) -> list of mappings`` is supplied.
    """
    t0 = time.perf_counter()
    tables = standard_tables(base)
    targets = target_catalog(base, max_size)
    cases = []
    for g in gens:
        fr = free_algebra(base, g)
        F = fr.algebra
        proj = fr.projection_indices
        gen_ok = len(generate_subalgebra(F, proj, tables)) == F.size
        for L in targets:
            homs = oracle(F, L) if oracle else [h.mapping for h in enumerate_homomorphisms(F, L, tables)]
            by_gens = {}
            for m in homs:
                by_gens.setdefault(tuple(int(v) for v in np.asarray(m)[proj]), []).append(np.asarray(m))
            bad = 0
            for values in product(range(L.size), repeat=g):
                alpha = GeneratorAssignment(L, values)
                try:
                    phi = phi_alpha(fr, alpha).homomorphism(tables)
                except AlgebraError:
                    bad += 1
                    continue
                found = by_gens.get(values, [])
                if len(found) != 1 or not np.array_equal(found[0], phi.mapping) \
                        or list(phi.mapping[proj]) != list(values):
                    bad += 1
            extra = len(homs) != L.size ** g
            cases.append({"gens": g, "target": L.provenance, "size": L.size, "assignments": L.size ** g,
                          "homomorphisms": len(homs), "violations": bad,
                          "ok": gen_ok and bad == 0 and not extra})
    return _report("free", cases, t0, base=base, gens=list(gens), max_size=max_size, targets=len(targets))


# -- functoriality --------------------------------------------------------------

def _random_map(rng, base: int, n_in: int, n_out: int) -> UniformMap:
    return UniformMap.from_coordinates(base, n_in, rng.integers(0, base, size=(n_out, base ** n_in)))


def verify_functor(trials: int = 100, seed: int = 0, base: int = 3, max_index: int = 3, max_size: int = 27) -> dict:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    targets = target_catalog(base, max_size)
    targets = [t for t in targets if t.size > 1]
    cases = []
    for trial in range(trials):
        L = targets[int(rng.integers(len(targets)))]
        nI, nJ, nK = (int(x) for x in rng.integers(1, max_index + 1, size=3))
        f = _random_map(rng, base, nI, nJ)
        g = _random_map(rng, base, nJ, nK)
        gf = f.then(g)
        alpha = GeneratorAssignment(L, rng.integers(0, L.size, nI))
        fbar, gbar, gfbar = induced_map(f, L), induced_map(g, L), induced_map(gf, L)
        beta = fbar(alpha)
        comp = gfbar(alpha).values == gbar(beta).values
        sample_K = rng.integers(0, base, size=(32, base ** nK)).astype(np.uint8)
        fs, gs, gfs = pullback_hom(f), pullback_hom(g), pullback_hom(gf)
        pull = np.array_equal(gfs(sample_K), fs(gs(sample_K))) and \
            np.array_equal(gfs.on_generators(), fs(gs.on_generators()))
        sample_J = np.concatenate([free_algebra(base, nJ).projections,
                                   rng.integers(0, base, size=(32, base ** nJ)).astype(np.uint8)])
        za, zb = _zalpha(alpha), _zalpha(beta)
        phis = np.array_equal(zb.phi(sample_J), za.phi(fs(sample_J)))
        ztrans = z_transfer_holds(f, zb, za, rng)
        E = connecting_map(beta, alpha, f)
        square = np.array_equal(za.iota.mapping[E.mapping], zb.iota.mapping)
        cases.append({"trial": trial, "target": L.provenance, "size": L.size, "I": nI, "J": nJ, "K": nK,
                      "composition": comp, "pullback": pull, "phi": phis, "z_transfer": ztrans, "square": square,
                      "ok": comp and pull and phis and ztrans and square})
    return _report("functor", cases, t0, seed=seed, base=base, max_index=max_index)


# -- Łoś ------------------------------------------------------------------------

def verify_los(base: int = 3, index: int = 3, count: int = 100, depth: int = 2, seed: int = 0) -> dict:
    t0 = time.perf_counter()
    corpus = generate_corpus(base, count, depth, seed)
    cases = []
    witness = None
    for F in all_filters(index):
        cp = ClonePower(base, F)
        for Z in ba_filters(cp.ba):
            L = limit_reduced_power(cp, Z)
            if Z.ultra:
                rep = los_check(L, corpus)
                cases.append({"filter": F.to_json(), "Z": members_of(Z.generator), "sentences": rep["count"],
                              "failures": rep["failures"], "ok": rep["ok"]})
            elif Z.proper and witness is None:
                rep = transfer_report(L, corpus)
                if rep["failures"]:
                    witness = {"filter": F.to_json(), "Z": members_of(Z.generator), "sentence": rep["failures"][0]}
    cases.append({"necessity_witness": witness, "ok": witness is not None})
    return _report("los", cases, t0, base=base, index=index, depth=depth, seed=seed, corpus=len(corpus.sentences))


# -- colimits -------------------------------------------------------------------

def random_chain(rng, L: VarietyAlgebra, max_len: int = 4, max_index: int = 3, tables=None) -> DirectedSystem:
    """A chain of nested assignments whose last stage generates ``L``."""
    gens = minimal_generating_set(L, tables)
    if len(gens) > max_index:
        raise AlgebraError("target needs too many generators")
    pool = list(rng.permutation(L.size)[: max_index].tolist())
    values = (pool[: max_index - len(gens)] + gens)[:max_index]
    # keep order random but the full list generating
    values = [values[i] for i in rng.permutation(len(values))]
    length = int(rng.integers(1, max_len + 1))
    sizes = sorted(int(s) for s in rng.integers(1, len(values) + 1, size=length))
    sizes[-1] = len(values)
    stages = [GeneratorAssignment(L, values[:s]) for s in sizes]
    return DirectedSystem(L, stages, [(d, d + 1) for d in range(length - 1)], tables)


def verify_colimit(trials: int = 20, seed: int = 0, base: int = 3, max_size: int = 27, systems=None) -> dict:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    targets = [t for t in target_catalog(base, max_size) if t.size > 1]
    systems = systems if systems is not None else []
    while len(systems) < trials:
        L = targets[int(rng.integers(len(targets)))]
        try:
            systems.append(random_chain(rng, L))
        except AlgebraError:
            continue
    cases = []
    for k, sys_ in enumerate(systems):
        case = {"system": k, "target": sys_.target.provenance, "size": sys_.target.size, "stages": sys_.size,
                "index_sizes": [a.index_size for a in sys_.stages]}
        try:
            C = directed_colimit(sys_)
            case["ok"] = C.to_target.is_isomorphism() and C.algebra.size == sys_.target.size
        except AlgebraError as exc:
            case.update(ok=False, error=str(exc))
        cases.append(case)
    return _report("colimit", cases, t0, seed=seed, base=base)


SUITES = {
    "thm1": verify_thm1,
    "ba": verify_ba,
    "thm2": verify_thm2,
    "thm3": verify_thm3,
    "free": verify_free,
    "functor": verify_functor,
    "los": verify_los,
    "colimit": verify_colimit,
}


def summary(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "cases"}


__all__ = ["SUITES", "summary", "target_catalog", "random_chain"] + [f.__name__ for f in SUITES.values()] + [
    "Homomorphism", "two_value_sentence"]
