import json

import pytest

from mipkit import decomposition as dc
from mipkit import group_core as gc


def test_homocyclic_rank_examples(groups):
    assert dc.homocyclic_rank(groups["C4"], 1) == 0
    assert dc.homocyclic_rank(groups["C4"], 2) == 1
    assert dc.homocyclic_rank(groups["D8"], 1) == 0
    assert dc.homocyclic_rank(groups["D8"], 2) == 0
    assert dc.homocyclic_rank(groups["D8xC4"], 2) == 1
    assert dc.homocyclic_rank(groups["C2xC2xC2"], 1) == 3


def test_extract_component_c4xc2(groups):
    T, S = dc.extract_component(groups["C4xC2"], 2)
    assert gc.abelian_type(T).to_list() == [4]
    assert S.order == 2


def test_extract_component_d8xc4(groups):
    T, S = dc.extract_component(groups["D8xC4"], 2)
    assert gc.abelian_type(T).to_list() == [4]
    assert S.order == 8 and not S.is_abelian()
    # the complement is the dihedral factor up to isomorphism: its
    # abelianization has type [2, 2]
    s_grp, _ = S.as_group()
    q, _ = gc.quotient(s_grp, gc.commutator_subgroup(s_grp))
    assert gc.abelian_type(q).to_list() == [2, 2]


def test_extract_component_rank_zero(groups):
    T, S = dc.extract_component(groups["Q8"], 1)
    assert T.is_trivial() and S.is_whole_group()
    T, S = dc.extract_component(groups["Q8"], 2)
    assert T.is_trivial() and S.is_whole_group()


def test_complement_of_twisted_torsion_factor(groups):
    # T = <(a, b)> inside C4 x C2 satisfies all preconditions; the claim
    # must return an order-2 complement
    G = groups["C4xC2"]
    emb_a, emb_b = None, None
    # catalog C4xC2 is presentation-built: generator indices from provenance
    g1, g2 = G.provenance["gen_indices"]
    twisted = G.subgroup((G.mul_elems(g1, g2),))
    assert gc.abelian_type(twisted).to_list() == [4]
    S = dc.complement_construction(G, twisted)
    assert S.order == 2
    assert gc.intersect_subgroups(S, twisted).is_trivial()


def test_complement_of_diagonal_in_c4xc4(groups):
    C4 = groups["C4"]
    G = gc.direct_product(C4, C4)
    emb_a, emb_b = G.embeddings
    diag = G.subgroup((G.mul_elems(emb_a(1), emb_b(1)),))
    S = dc.complement_construction(G, diag)
    assert gc.abelian_type(S).to_list() == [4]
    assert gc.intersect_subgroups(S, diag).is_trivial()


def test_complement_of_trivial_subgroup(groups):
    G = groups["D8"]
    assert dc.complement_construction(G, G.trivial_subgroup()).is_whole_group()


def test_complement_preconditions_checked(groups):
    G = groups["C4xC2"]
    g1, _ = G.provenance["gen_indices"]
    inside_frattini = G.subgroup((G.power(g1, 2),))
    with pytest.raises(ValueError):
        dc.complement_construction(G, inside_frattini)
    D8 = groups["D8"]
    derived = gc.commutator_subgroup(D8)  # meets Mho_1(G)G' nontrivially
    with pytest.raises(ValueError):
        dc.complement_construction(D8, derived)


def test_split_d8xc4xc2(groups):
    d = dc.ab_nab_split(groups["D8xC4xC2"])
    assert d.nab.order == 8 and not d.nab.is_abelian()
    assert d.ab_type().to_list() == [4, 2]
    assert [(c.t, c.rank) for c in d.components] == [(1, 1), (2, 1)]
    assert d.certificate["nab"]["abelianization"] == [2, 2]


def test_split_of_abelian_groups_gives_invariant_factors(groups):
    for name in ("C2", "C8", "C16", "C4xC2", "C2xC2xC2", "C9xC3", "C27"):
        G = groups[name]
        d = dc.ab_nab_split(G)
        assert d.nab.is_trivial(), name
        assert d.ab_type() == gc.abelian_type(G), name


def test_split_of_indecomposables_extracts_nothing(groups):
    for name in ("Q8", "D8", "D16", "Q16", "SD16", "M16", "Heis27", "M27"):
        d = dc.ab_nab_split(groups[name])
        assert d.components == ()
        assert d.nab.is_whole_group(), name


def test_split_idempotent_on_nonabelian_part(groups):
    d = dc.ab_nab_split(groups["D8xC4xC2"])
    nab_grp, _ = d.nab.as_group()
    again = dc.ab_nab_split(nab_grp)
    assert again.components == ()
    assert again.nab.is_whole_group()


def test_component_checks_pass(groups):
    for name in ("D8xC4xC2", "D8xC2", "Q8xC4", "C4xC2"):
        G = groups[name]
        d = dc.ab_nab_split(G)
        report = dc.component_checks(G, d)
        assert report["all_pass"], (name, report)


def test_agemo_derived_match_for_complement(groups):
    # Mho_2(G)G' computed in G equals Mho_2(S)S' for the dihedral complement
    G = groups["D8xC4"]
    T, S = dc.extract_component(G, 2)
    lhs = gc.join(gc.agemo(G, 2), gc.commutator_subgroup(G))
    rhs = gc.join(gc.agemo(S, 2), gc.commutator_subgroup(S))
    assert lhs == rhs
    assert lhs.order == 2  # <r^2> inside the dihedral factor


def test_formula_ab_type_matches_peeling(small_groups):
    for name, G in small_groups.items():
        assert dc.formula_ab_type(G) == dc.ab_nab_split(G).ab_type(), name


def test_split_merges_with_abelian_products(groups):
    for g_name in ("D8", "Q8", "C4"):
        for a_name in ("C2", "C4xC2"):
            G = gc.direct_product(groups[g_name], groups[a_name])
            expected = (
                dc.ab_nab_split(groups[g_name])
                .ab_type()
                .merge(gc.abelian_type(groups[a_name]))
            )
            assert dc.ab_nab_split(G).ab_type() == expected, (g_name, a_name)


def test_split_determinism(groups):
    from mipkit import catalog as cat

    entry = next(e for e in cat.builtin_catalog() if e.name == "D8xC4xC2")
    a = dc.ab_nab_split(entry.build()).certificate
    b = dc.ab_nab_split(entry.build()).certificate
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert json.dumps(a, sort_keys=True) == json.dumps(
        dc.ab_nab_split(groups["D8xC4xC2"]).certificate, sort_keys=True
    )


def test_peel_trace_shape(groups):
    d = dc.ab_nab_split(groups["D8xC4xC2"])
    trace = d.certificate["peel_trace"]
    assert [step["t"] for step in trace] == [1, 2]
    assert [step["rank"] for step in trace] == [1, 1]
    assert trace[-1]["residual_order"] == 8
