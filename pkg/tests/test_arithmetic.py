import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symspace.arithmetic import (
    IntMatrix,
    cayley_edges,
    closure,
    conjugacy_classes,
    diag_to_eta_t,
    element_order,
    fl_action,
    identity,
    inverse_free_section,
    orbit_of_translations,
    p32,
    sorqz_generators,
    sorqz_relations,
    sp4z_generators,
    sp4z_relations,
    to_eta_t_basis,
    weyl_group_order,
    weyl_order_formula,
    word_eval,
)
from symspace.errors import Exceeded
from symspace.liealg import SignatureParams, build_eta_t
from symspace.titssatake import SiegelPoint, to_siegel

from conftest import load_fixture

G = sp4z_generators()
Z0 = SiegelPoint.from_complex(np.array([[2j, 0.3], [0.3, 1j]]))


# the table writes one word with a bare "S"; only S2 reproduces its matrix
ALIASES = {"S": "S2"}


def _dotted(word):
    out = identity(4)
    for name in word.split("."):
        out = out @ G[ALIASES.get(name, name)]
    return out


# --- Sp(4,Z) generators and relations ----------------------------------------------

def test_generators_are_integer_symplectic():
    for m in G.values():
        assert m.preserves_form()
        assert all(isinstance(x, int) for row in m.rows for x in row)


def test_first_translation():
    assert G["T1"].rows == ((1, 0, 1, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def test_word_relations_exact():
    I = identity(4)
    A, B = G["A"], G["B"]
    assert A ** 8 == I and B ** 4 == I and (B @ A) ** 4 == I
    for a, b in ((1, 6), (2, 8), (3, 7), (4, 5)):
        assert (G[f"T{a}"] @ G[f"T{b}"]) ** 6 == I
    assert G["Q1"] ** 4 == I


def test_all_recorded_relations_hold():
    results = sp4z_relations()
    assert results and all(r.holds for r in results), [r for r in results if not r.holds]
    modes = {r.name: r.mode for r in results}
    assert modes["A^8 = 1"] == "matrixwise"
    assert modes["(T1 T6)^6 = 1"] == "matrixwise"
    assert modes["T5 = T4^-T"] == "matrixwise"
    assert all(m in {"matrixwise", "up to sign", "block sign"} for m in modes.values())


def test_inverse_and_powers():
    for m in G.values():
        assert (m @ m.inv()).is_identity()
        assert m ** 0 == identity(4)
        assert m ** -2 == m.inv() @ m.inv()


# --- finite group --------------------------------------------------------------------

def test_closure_small_cases():
    assert len(closure([identity(4)])) == 1
    assert len(closure([G["Q1"]])) == 4
    with pytest.raises(ValueError):
        closure([])


def test_p32_matches_table():
    grp = p32()
    assert len(grp) == 32
    table = load_fixture("p32_table.json")
    assert len(table) == 32
    mats = {IntMatrix.of(e["matrix"]).key() for e in table.values()}
    assert mats == {g.key() for g in grp}
    for e in table.values():
        assert _dotted(e["word"]).key() == IntMatrix.of(e["matrix"]).key()
        assert word_eval(e["ab_word"], {"A": G["A"], "B": G["B"]}).key() == IntMatrix.of(e["matrix"]).key()


def test_closure_is_order_independent():
    gens = [G["S1"], G["S2"], G["Q1"], G["Q2"]]
    ref = {g.key() for g in closure(gens)}
    rnd = random.Random(3)
    for _ in range(5):
        rnd.shuffle(gens)
        assert {g.key() for g in closure(gens)} == ref
    assert {g.key() for g in closure([G["A"], G["B"]])} == ref


def test_conjugacy_classes():
    assert len(conjugacy_classes([identity(4)])) == 1
    grp = p32()
    classes = conjugacy_classes(grp)
    assert len(classes) == 14
    assert sum(len(c) for c in classes) == 32
    assert {element_order(g) for g in grp} <= {1, 2, 4, 8}


def test_translation_orbit():
    orbit = orbit_of_translations()
    assert len(orbit) == 16
    keys = {u.key() for u in orbit}
    assert all(u.inv().key() in keys for u in orbit)
    section = inverse_free_section(orbit)
    assert len(section) == 8
    sk = {u.key() for u in section}
    assert all(u.inv().key() not in sk for u in section)


@pytest.mark.parametrize("k", range(1, 9))
def test_translations_generate_infinite_groups(k):
    with pytest.raises(Exceeded):
        closure([G[f"T{k}"]], cap=1000)


def test_cayley_edges():
    grp = p32()
    gens = [G["A"], G["B"]]
    edges = cayley_edges(grp, gens)
    assert len(edges) == 64
    for i, k, j in edges[:10]:
        assert (gens[k] @ grp[i]).key() == grp[j].key()


# --- fractional linear action --------------------------------------------------------

def _close(a, b, tol=1e-12):
    return np.abs(a.Z - b).max() < tol


def test_fl_translations_and_identity():
    z, w, ze = Z0.Z[0, 0], Z0.Z[0, 1], Z0.Z[1, 1]
    assert _close(fl_action(identity(4), Z0), Z0.Z)
    assert _close(fl_action(G["T1"], Z0), np.array([[z + 1, w], [w, ze]]))


def test_fl_symbolic_actions():
    z, w, ze = Z0.Z[0, 0], Z0.Z[0, 1], Z0.Z[1, 1]
    A = np.array([[ze - w * w / z, w / z], [w / z, -1 / z]])
    d = w * w - ze * z
    B = np.array([[z / d, -w / d], [-w / d, ze / d]])
    BA = np.array([[z - w * w / ze, -w / ze], [-w / ze, -1 / ze]])
    assert _close(fl_action(G["A"], Z0), A)
    assert _close(fl_action(G["B"], Z0), B)
    assert _close(fl_action(G["B"] @ G["A"], Z0), BA)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(sorted(G)), min_size=1, max_size=6), st.integers(0, 2**31 - 1))
def test_fl_is_an_action(word, seed):
    Z = to_siegel(np.random.default_rng(seed).uniform(-1, 1, 6))
    direct = fl_action(_dotted(".".join(word)), Z)
    nested = Z
    for name in reversed(word):
        nested = fl_action(G[name], nested)
    assert np.abs(direct.Z - nested.Z).max() <= 1e-12 * max(1, np.abs(direct.Z).max()) * 10
    assert direct.is_valid()


# --- SO(r, r+q, Z) ------------------------------------------------------------------

def test_sorqz_matches_appendix():
    data = load_fixture("sorqz_appendix.json")
    for key, mats in data.items():
        r, q = map(int, key.split(","))
        gens = sorqz_generators(r, q)
        for name, m in mats.items():
            assert gens[name].rows == IntMatrix.of(m).rows, name
    assert sorqz_generators(2, 1)["T1^1"].rows[0] == (3, 0, 2, 0, 2)


@pytest.mark.parametrize("r,q", [(r, q) for r in range(1, 5) for q in range(1, 4)])
def test_sorqz_forms_and_relations(r, q):
    gens = sorqz_generators(r, q)
    assert all(m.preserves_form() for m in gens.values())
    assert all(res.holds and res.mode == "matrixwise" for res in sorqz_relations(r, q))


def test_sorqz_rejects_split_case():
    with pytest.raises(ValueError):
        sorqz_generators(2, 0)


@pytest.mark.parametrize("r,expected", [(1, 2), (2, 16), (3, 192)])
def test_weyl_orders_q1(r, expected):
    assert weyl_group_order(r, 1) == expected == weyl_order_formula(r)


@pytest.mark.parametrize("r,q,expected", [(2, 2, 32), (2, 3, 64), (3, 2, 384)])
def test_weyl_orders_higher_q(r, q, expected):
    assert weyl_group_order(r, q) == expected


def test_weyl_formula_values():
    assert [weyl_order_formula(r) for r in range(1, 5)] == [2, 16, 192, 3072]


@pytest.mark.parametrize("r,q", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_basis_bridge(r, q):
    P = diag_to_eta_t(r, q)
    eta_d = np.diag([1.0] * r + [-1.0] * (r + q))
    eta_t = build_eta_t(SignatureParams(r, q // 2, odd=bool(q % 2)))
    assert np.abs(P.T @ eta_d @ P + eta_t).max() < 1e-15
    for name, m in sorqz_generators(r, q).items():
        t = to_eta_t_basis(m)
        assert np.abs(t.T @ eta_t @ t - eta_t).max() < 1e-12, name


def test_bridge_parabolic_translations_are_triangular():
    for name, m in sorqz_generators(2, 2).items():
        if name.startswith("T"):
            t = to_eta_t_basis(m)
            assert np.abs(np.tril(t, -1)).max() < 1e-12, name
