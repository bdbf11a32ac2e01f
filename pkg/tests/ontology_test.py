import pytest

from ontopred.OntologyGraph import (
    OntologyGraph,
    ancestors,
    drop_isolated,
    max_depth,
    parse_obo,
)
from ontopred.const import Namespace
from ontopred.exceptions import (
    CrossNamespaceError,
    CycleError,
    EmptyNamespaceError,
    ParseError,
    PreconditionError,
    UnknownTermError,
)
from ontopred.synthetic import random_dag

R, A, B, C = 0, 1, 2, 3


def _term(accession, namespace="molecular_function", parents=(), extra=""):
    lines = [
        "[Term]",
        f"id: {accession}",
        f"name: {accession}",
        f"namespace: {namespace}",
    ]
    lines += [f"is_a: {p}" for p in parents]
    if extra:
        lines.append(extra)
    return "\n".join(lines) + "\n\n"


def _relaxation_ancestors(g):
    """Fixpoint edge relaxation, independent of the memoized table."""
    closure = [set(g.parents[i]) for i in range(len(g))]
    changed = True
    while changed:
        changed = False
        for i in range(len(g)):
            extra = set()
            for p in closure[i]:
                extra |= closure[p]
            if not extra <= closure[i]:
                closure[i] |= extra
                changed = True
    return [sorted(c) for c in closure]


def test_parse_diamond(t1):
    assert len(t1) == 4
    assert t1.terms == ("GO:0000001", "GO:0000002", "GO:0000003", "GO:0000004")
    assert t1.parents[C] == (A, B)
    assert t1.children[R] == (A, B)
    assert t1.edge_count == 4
    assert t1.namespaces == (Namespace.MFO,) * 4
    assert t1.names[C] == "term c"
    assert t1.roots() == [R]


def test_parse_singleton():
    g = parse_obo(_term("GO:0000010"))
    assert len(g) == 1
    assert g.parents == ((),)
    assert g.children == ((),)
    assert max_depth(g, Namespace.MFO) == 1


def test_parse_two_cycle():
    text = _term("GO:0000001", parents=["GO:0000002"]) + _term(
        "GO:0000002", parents=["GO:0000001"]
    )
    with pytest.raises(CycleError) as excinfo:
        parse_obo(text)
    assert set(excinfo.value.cycle) == {"GO:0000001", "GO:0000002"}


def test_parse_undefined_target():
    with pytest.raises(UnknownTermError):
        parse_obo(_term("GO:0000001", parents=["GO:0000099"]))


def test_parse_missing_namespace_reports_line():
    text = "format-version: 1.2\n\n[Term]\nid: GO:0000001\nname: x\n"
    with pytest.raises(ParseError) as excinfo:
        parse_obo(text, source="bad.obo")
    assert excinfo.value.line_number == 3
    assert "bad.obo:3" in str(excinfo.value)


def test_parse_rejects_cross_namespace_edge():
    text = _term("GO:0000001", "biological_process") + _term(
        "GO:0000002", parents=["GO:0000001"]
    )
    with pytest.raises(CrossNamespaceError):
        parse_obo(text)


@pytest.mark.parametrize(
    "accession",
    ["GO:3", "GO:00000001", "XX:0000001"],
)
def test_parse_rejects_bad_accession(accession):
    with pytest.raises(ParseError):
        parse_obo(_term(accession))


def test_parse_canonicalizes_prefix_and_sorts():
    text = _term("go:0000005") + _term("GO:0000002", parents=["go:0000005"])
    g = parse_obo(text)
    assert g.terms == ("GO:0000002", "GO:0000005")
    assert g.parents[0] == (1,)


def test_obsolete_terms_dropped_and_counted():
    text = (
        _term("GO:0000001")
        + _term("GO:0000002", extra="is_obsolete: true")
        + _term("GO:0000003", parents=["GO:0000001", "GO:0000002"])
    )
    g = parse_obo(text)
    assert g.terms == ("GO:0000001", "GO:0000003")
    assert g.obsolete_dropped == 1
    assert g.parents[1] == (0,)


def test_ancestors_diamond(t1):
    assert ancestors(t1, C) == [R, A, B]
    assert ancestors(t1, R) == []
    assert ancestors(t1, A) == [R]


def test_descendants_and_lookup(t1):
    assert t1.descendants(R) == [A, B, C]
    assert t1.descendants(C) == []
    assert t1.term_index("go:0000003") == B
    assert t1.term_index("GO:0000099") is None


def test_topological_order_puts_parents_first(t1):
    assert t1.topological_order == (R, A, B, C)
    for seed in range(5):
        g = random_dag(40, seed=seed)
        position = {k: n for n, k in enumerate(g.topological_order)}
        assert len(position) == len(g)
        for i in range(len(g)):
            assert all(position[p] < position[i] for p in g.parents[i])


def test_ancestors_out_of_range(t1):
    with pytest.raises(PreconditionError):
        t1.ancestors(4)


def test_max_depth(t1):
    assert max_depth(t1, Namespace.MFO) == 3
    assert t1.depths.tolist() == [1, 2, 2, 3]
    with pytest.raises(EmptyNamespaceError):
        max_depth(t1, Namespace.BPO)


def test_max_depth_chain_of_80():
    text = _term("GO:0000001") + "".join(
        _term(f"GO:{i:07d}", parents=[f"GO:{i - 1:07d}"]) for i in range(2, 81)
    )
    assert max_depth(parse_obo(text), Namespace.MFO) == 80


def test_drop_isolated_removes_floating_term(t1_text):
    g = parse_obo(t1_text + _term("GO:0000009"))
    kept, remap = drop_isolated(g, annotated=set())
    assert len(g) == 5
    assert len(kept) == 4
    assert 4 not in remap
    assert kept.terms == g.terms[:4]


def test_drop_isolated_identity(t1):
    kept, remap = drop_isolated(t1, annotated={C})
    assert kept == t1
    assert remap == {0: 0, 1: 1, 2: 2, 3: 3}


def test_drop_isolated_keeps_annotated_floating_term(t1_text):
    g = parse_obo(t1_text + _term("GO:0000009"))
    kept, _ = drop_isolated(g, annotated={4})
    assert len(kept) == 5


def test_subgraph_splits_namespaces(t1_text):
    g = parse_obo(t1_text + _term("GO:0000008", "cellular_component"))
    mfo, remap = g.subgraph(Namespace.MFO)
    cco, _ = g.subgraph(Namespace.CCO)
    assert len(mfo) == 4 and len(cco) == 1
    assert remap == {0: 0, 1: 1, 2: 2, 3: 3}
    assert g.present_namespaces() == [Namespace.MFO, Namespace.CCO]


def test_obo_round_trip(t1):
    assert parse_obo(t1.to_obo()) == t1


def test_constructor_requires_lexicographic_order():
    with pytest.raises(PreconditionError):
        OntologyGraph(
            terms=("GO:0000002", "GO:0000001"),
            names=("b", "a"),
            namespaces=(Namespace.MFO, Namespace.MFO),
            parents=((), ()),
        )


def test_random_dags_ancestor_properties():
    for seed in range(30):
        g = random_dag(1 + seed * 6, seed=seed, window=3 + seed % 5)
        relaxed = _relaxation_ancestors(g)
        for i in range(len(g)):
            anc = set(g.ancestors(i))
            assert i not in anc
            assert sorted(anc) == relaxed[i]
            for j in anc:
                assert set(g.ancestors(j)) < anc
        assert parse_obo(g.to_obo()) == g
