import pytest

from relspace.appendix import appendix_complex, compare_with_recursive, isomorphism_to_minimal
from relspace.complex import relation_complex


@pytest.mark.parametrize("tag", ["A2", "A3", "B2", "B3", "D3", "D4", "Phi(3,1)", "Phi(4,2)"])
def test_closed_form_complex_is_contractible(tag):
    app = appendix_complex(tag)
    assert app.report["homotopy"]["passed"]
    C = relation_complex(app.arrangement, app.lattice)
    assert tuple(C.dims) == tuple(app.complex.dims)
    if "dimension_formula" in app.report:
        assert app.report["dimension_formula"]["passed"]


@pytest.mark.parametrize("tag", ["A3", "B3", "D4"])
def test_equivariant_closed_form_equals_recursion(tag):
    assert compare_with_recursive(appendix_complex(tag, "equivariant"))["equal"]


def test_b_cone_variant():
    assert appendix_complex("B3", "cone").report["homotopy"]["passed"]


def test_phi_closed_form_uses_degenerate_degree_zero_data():
    # the closed form for Phi(n, m), 0 < m < n, vanishes on some atoms in degree zero,
    # so it is a different contraction from the recursive one
    cmp = compare_with_recursive(appendix_complex("Phi(3,1)", "equivariant"))
    assert cmp["own_section_valid"]
    assert not cmp["equal"]
    assert not cmp["equal_own_section"]


def test_isomorphism_is_identity_on_bottom():
    app = appendix_complex("A2")
    iso = isomorphism_to_minimal(app)
    b = app.lattice.lattice.bottom
    assert iso[b].rank() == app.complex.dims[b]


@pytest.mark.parametrize("tag", ["E6", "A0", "Phi(2,3)", "D1"])
def test_bad_tags(tag):
    with pytest.raises(ValueError):
        appendix_complex(tag)
