"""Desk-scale verification suites for both reductions.

Each suite returns a :class:`SuiteResult`; ``run_suites`` drives them for the
``selftest`` command and for ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels, onevar
from .corpus import all_formulas, qbf_corpus, random_corpus
from .decide import Budget, Sat, Unsat, completeness_bound, frames_of_class, sat_bruteforce, sat_decide
from .formula import TOP, And, Box, Falsum, Formula, Implies, Not, Var, max_var, substitute, to_core, variables
from .kripke import FrameClass, is_in_class, is_reflexive, is_symmetric, model_check
from .qbf import eval_qbf, ladner_translate, negated_translate, witness_model

BRUTEFORCE_CAP = 3


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        lim = f" / limit {self.limit:.0f}s" if self.limit else ""
        return f"{tag} {self.name} ({self.seconds:.2f}s{lim}): {self.detail}"


# --- chain models ---------------------------------------------------------


def check_epsilon_pins(max_k: int = 5) -> tuple[bool, str]:
    bad = []
    checked = 0
    for k in range(1, max_k + 1):
        chain = onevar.build_chain(k)
        for i in range(1, k + 1):
            target = chain.c_world(i)
            for x in onevar.chain_segment(chain, i):
                checked += 1
                if model_check(chain.model, x, onevar.epsilon(i)) != (x == target):
                    bad.append((k, i, x))
    return not bad, f"{checked} (k, i, world) triples, {len(bad)} mismatches {bad[:3]}"


def _chain_size_by_description(k: int) -> int:
    # root, then for each i a leading p-world (except i = 1) and 2i+1 others, then three p-worlds
    return 1 + sum((0 if i == 1 else 1) + 2 * i + 1 for i in range(1, k + 1)) + 3


def check_chain_structure(max_k: int = 10) -> tuple[bool, str]:
    bad = []
    for k in range(1, max_k + 1):
        chain = onevar.build_chain(k)
        n = chain.model.world_count
        frame = chain.model.frame
        if n != k * k + 3 * k + 3 or n != _chain_size_by_description(k):
            bad.append((k, "size", n))
        if not (is_reflexive(frame) and is_symmetric(frame)):
            bad.append((k, "frame"))
    return not bad, f"k = 1..{max_k}, problems: {bad or 'none'}"


# --- the relativised formula with the guard set to true ---------------------


def check_hat_faithfulness(corpus: list[Formula], max_worlds: int = 3) -> tuple[bool, str]:
    bad = []
    models = 0
    for phi in corpus:
        n = max_var(phi)
        unguarded = substitute(onevar.hat(phi), {n + 1: TOP})
        var_list = list(range(1, n + 1))
        prog = _kernels.compile_formulas([phi, unguarded], var_indices=var_list)
        for worlds in range(1, max_worlds + 1):
            vals = _kernels.valuation_table(worlds, len(var_list))
            for succ in frames_of_class(worlds, FrameClass.K):
                res = _kernels.eval_batch(prog, worlds, succ, vals)
                models += res.shape[0] * res.shape[1]
                if not np.array_equal(res[:, :, 0], res[:, :, 1]):
                    bad.append(phi)
                    break
    return not bad, f"{len(corpus)} formulas x {models // max(len(corpus), 1)} K-models each, {len(bad)} disagreements"


# --- witness direction of the embedding ----------------------------------


def check_witness_transfer(corpus: list[Formula]) -> tuple[bool, str, bool, str]:
    """Returns (witness ok, detail, linking ok, detail)."""
    bad = []
    bad_sub = []
    witnesses = 0
    sub_checks = 0
    for c in onevar.EMBEDDING_CLASSES:
        for phi in corpus:
            res = sat_bruteforce(phi, c, BRUTEFORCE_CAP)
            if not isinstance(res, Sat):
                continue
            witnesses += 1
            attached, w0 = onevar.star_witness(res.model, res.world, phi, c)
            if not (model_check(attached, w0, onevar.star(phi)) and is_in_class(attached.frame, c)):
                bad.append((c.value, str(phi)))
            ctx = onevar.EmbeddingContext.of(phi)
            roots = onevar.chain_roots(res.model.world_count, ctx)
            for k, r in enumerate(roots, start=1):
                sub_checks += 1
                linked = frozenset(x for x in range(res.model.world_count) if (x, r) in attached.frame.relation)
                if onevar.diamond_alpha_worlds(attached, res.model.world_count, k) != linked:
                    bad_sub.append((c.value, str(phi), k))
    return (
        not bad,
        f"{witnesses} witnesses over K/KB/KTB, {len(bad)} failures {bad[:2]}",
        not bad_sub and sub_checks > 0,
        f"{sub_checks} (model, k) checks, {len(bad_sub)} failures {bad_sub[:2]}",
    )


# --- substitution-instance identity -----------------------------------------


def star_by_parts(phi: Formula) -> Formula:
    """beta_{n+1} & sigma(phi'), built by recursion over phi itself."""
    n = max_var(phi)
    guard = onevar.beta(n + 1)

    def go(f: Formula) -> Formula:
        if isinstance(f, Var):
            return onevar.beta(f.index)
        if isinstance(f, Falsum):
            return f
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Box):
            return Box(Implies(guard, go(f.body)))
        raise TypeError(f)

    return And((guard, go(to_core(phi))))


def check_substitution_identity(corpus: list[Formula]) -> tuple[bool, str]:
    bad = []
    for phi in corpus:
        ctx = onevar.EmbeddingContext.of(phi)
        s = onevar.star(phi, ctx)
        if s != substitute(onevar.hat(phi, ctx), onevar.sigma(ctx)) or s != star_by_parts(phi):
            bad.append(str(phi))
        if not variables(s) <= {1}:
            bad.append(f"vars {str(phi)}")
    return not bad, f"{len(corpus)} formulas, {len(bad)} mismatches {bad[:2]}"


# --- the QBF reduction ---------------------------------------------------------


def check_qbf_reduction(per_instance_seconds: float = 60.0) -> tuple[bool, str]:
    bad = []
    n_true = n_false = 0
    for theta in qbf_corpus():
        f = ladner_translate(theta)
        if eval_qbf(theta):
            n_true += 1
            model, root = witness_model(theta)
            if not (model_check(model, root, f) and is_in_class(model.frame, FrameClass.KTB)):
                bad.append(("witness", str(theta)))
        else:
            n_false += 1
            t0 = time.monotonic()
            res = sat_decide(f, FrameClass.K, Budget(seconds=per_instance_seconds))
            if not isinstance(res, Unsat) or time.monotonic() - t0 > per_instance_seconds:
                bad.append(("unsat", str(theta), type(res).__name__))
    return not bad, f"{n_true} true / {n_false} false QBFs, failures: {bad[:3] or 'none'}"


def check_single_variable_end_to_end() -> tuple[bool, str]:
    bad = []
    count = 0
    for theta in qbf_corpus(max_m=1):
        t = negated_translate(theta)
        if not variables(onevar.embed(t)) == {1}:
            bad.append(("vars", str(theta)))
        if not eval_qbf(theta):
            continue
        count += 1
        model, root = witness_model(theta)
        target = Not(t)
        attached, w0 = onevar.star_witness(model, root, target, FrameClass.KTB)
        if not (model_check(attached, w0, onevar.star(target)) and is_in_class(attached.frame, FrameClass.KTB)):
            bad.append(("model", str(theta)))
    return not bad and count > 0, f"{count} true m=1 QBFs, failures: {bad or 'none'}"


# --- oracle agreement ----------------------------------------------------------------


def check_oracle_agreement(max_size: int = 6) -> tuple[bool, str]:
    formulas = all_formulas(max_size)
    bad = []
    both = 0
    for c in FrameClass:
        for phi in formulas:
            d = sat_decide(phi, c)
            b = sat_bruteforce(phi, c, min(completeness_bound(phi, c), BRUTEFORCE_CAP))
            if isinstance(d, (Sat, Unsat)) and isinstance(b, (Sat, Unsat)):
                both += 1
                if isinstance(d, Sat) != isinstance(b, Sat):
                    bad.append((c.value, str(phi)))
    return not bad, f"{len(formulas)} formulas x 6 classes, {both} conclusive pairs, {len(bad)} disagreements {bad[:3]}"


# --- driver ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    limit: float | None
    run: Callable[[int], tuple[bool, str]]


@lru_cache(maxsize=4)
def _transfer_cached(seed: int) -> tuple[bool, str, bool, str]:
    return check_witness_transfer(random_corpus(seed=seed))


def _transfer_parts(seed: int, part: int) -> tuple[bool, str]:
    res = _transfer_cached(seed)
    return (res[0], res[1]) if part == 0 else (res[2], res[3])


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("lemma3", 10, lambda seed: check_epsilon_pins()),
        Suite("chain", 1, lambda seed: check_chain_structure()),
        Suite("hat", 60, lambda seed: check_hat_faithfulness(random_corpus(seed=seed))),
        Suite("lemma4", 120, lambda seed: _transfer_parts(seed, 0)),
        Suite("sublemma2", 120, lambda seed: _transfer_parts(seed, 1)),
        Suite("identity", None, lambda seed: check_substitution_identity(random_corpus(seed=seed))),
        Suite("theorem1", None, lambda seed: check_qbf_reduction()),
        Suite("theorem3", 120, lambda seed: check_single_variable_end_to_end()),
        Suite("oracle", 600, lambda seed: check_oracle_agreement()),
    ]
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    suite = SUITES[name]
    t0 = time.monotonic()
    ok, detail = suite.run(seed)
    elapsed = time.monotonic() - t0
    if suite.limit is not None and elapsed > suite.limit:
        ok = False
        detail += f" [over time limit {suite.limit}s]"
    return SuiteResult(name, ok, detail, elapsed, suite.limit)


def run_suites(names: list[str] | None = None, seed: int = 0) -> list[SuiteResult]:
    return [run_suite(n, seed) for n in (names or list(SUITES))]
