import numpy as np
import pytest
from hypothesis import given, settings

from modalred import _kernels
from modalred.decide import frames_of_class
from modalred.formula import And, Box, Var, variables
from modalred.kripke import Frame, FrameClass, Model, truth_sets

from conftest import formulas

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba disabled or missing")


def _batch_inputs(phi, n, c=FrameClass.K):
    var_list = sorted(variables(phi))
    prog = _kernels.compile_formulas([phi], var_indices=var_list)
    succ = np.concatenate(list(frames_of_class(n, c)))
    vals = _kernels.valuation_table(n, len(var_list))
    return prog, succ, vals, var_list


@needs_numba
@given(formulas())
@settings(max_examples=60, deadline=None)
def test_numba_matches_numpy(phi):
    prog, succ, vals, _ = _batch_inputs(phi, 2)
    a = _kernels.eval_batch(prog, 2, succ, vals, use_numba=True)
    b = _kernels.eval_batch(prog, 2, succ, vals, use_numba=False)
    assert np.array_equal(a, b)


@given(formulas())
@settings(max_examples=40, deadline=None)
def test_batch_matches_dense(phi):
    n = 2
    prog, succ, vals, var_list = _batch_inputs(phi, n)
    batch = _kernels.eval_batch(prog, n, succ, vals)
    for f in range(0, len(succ), 3):
        rel = {(a, b) for a in range(n) for b in range(n) if (int(succ[f, a]) >> b) & 1}
        for v in range(len(vals)):
            val = {var: {w for w in range(n) if (int(vals[v, s]) >> w) & 1} for s, var in enumerate(var_list)}
            dense = truth_sets(Model(Frame(n, frozenset(rel)), val), [phi])[0]
            mask = sum(1 << w for w in range(n) if dense[w])
            assert int(batch[f, v, 0]) == mask


def test_frames_of_class_counts():
    # 2 worlds: 16 relations; reflexive 4; symmetric 8; serial 9; reflexive+symmetric 2; serial+symmetric 5
    counts = {c: sum(len(s) for s in frames_of_class(2, c)) for c in FrameClass}
    assert counts == {
        FrameClass.K: 16,
        FrameClass.KD: 9,
        FrameClass.T: 4,
        FrameClass.KB: 8,
        FrameClass.KDB: 5,
        FrameClass.KTB: 2,
    }


def test_valuation_table_order():
    t = _kernels.valuation_table(2, 2)
    assert t.shape == (16, 2)
    assert t[1].tolist() == [1, 0] and t[4].tolist() == [0, 1]
    with pytest.raises(ValueError):
        _kernels.valuation_table(5, 5)


def test_batch_world_limit():
    prog = _kernels.compile_formulas([Box(Var(1))])
    with pytest.raises(ValueError):
        _kernels.eval_batch(prog, 65, np.zeros((1, 65), np.uint64), np.zeros((1, 1), np.uint64))


def test_shared_subterms_compiled_once():
    b = Box(Var(1))
    prog = _kernels.compile_formulas([And((b, Box(Var(1)))), b])
    assert len(prog) == 3  # var, box, and
    assert prog.roots[1] == 1


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.setenv("MODALRED_DISABLE_NUMBA", "1")
    assert not _kernels._numba_requested()
    monkeypatch.setenv("MODALRED_DISABLE_NUMBA", "0")
    assert _kernels._numba_requested()
