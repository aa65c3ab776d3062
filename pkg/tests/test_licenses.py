from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telokit.errors import IncompatibleComposition, LicenseDowngrade
from telokit.licenses import (
    ATTRIBUTION,
    NON_COMMERCIAL,
    SHARE_ALIKE,
    License,
    compose_licenses,
    derive_crep_license,
    license_for_flags,
    parse_license,
)

ALL = list(License)


def oracle_flags(lic: License) -> frozenset[str]:
    return {
        License.CC0: frozenset(),
        License.CC_BY: frozenset({ATTRIBUTION}),
        License.CC_BY_NC: frozenset({ATTRIBUTION, NON_COMMERCIAL}),
        License.CC_BY_SA: frozenset({ATTRIBUTION, SHARE_ALIKE}),
        License.CC_BY_NC_SA: frozenset({ATTRIBUTION, NON_COMMERCIAL, SHARE_ALIKE}),
    }[lic]


def oracle_from_flags(flags: frozenset[str]) -> License:
    flags = frozenset(flags | {ATTRIBUTION}) if flags else flags
    for lic in ALL:
        if oracle_flags(lic) == flags:
            return lic
    raise AssertionError(flags)


def derive_oracle(srep: License, requested: License):
    """Flag-algebra oracle: SA sources are verbatim, NC may not be dropped,
    otherwise the source's flags are forced onto the requested license."""
    if SHARE_ALIKE in oracle_flags(srep):
        return srep if requested is srep else "downgrade"
    if NON_COMMERCIAL in oracle_flags(srep) and NON_COMMERCIAL not in oracle_flags(requested):
        return "downgrade"
    return oracle_from_flags(oracle_flags(srep) | oracle_flags(requested))


def compose_oracle(licenses: list[License]):
    if License.CC_BY_SA in licenses and License.CC_BY_NC_SA in licenses:
        return "incompatible"
    flags = frozenset()
    for lic in licenses:
        flags |= oracle_flags(lic)
    return oracle_from_flags(flags)


def test_flag_derivation_is_fixed():
    assert License.CC0.flags == frozenset()
    assert License.CC_BY.flags == {ATTRIBUTION}
    assert License.CC_BY_NC.flags == {ATTRIBUTION, NON_COMMERCIAL}
    assert License.CC_BY_SA.flags == {ATTRIBUTION, SHARE_ALIKE}
    assert License.CC_BY_NC_SA.flags == {ATTRIBUTION, NON_COMMERCIAL, SHARE_ALIKE}


def test_all_25_derivation_pairs_match_oracle():
    for srep, requested in itertools.product(ALL, ALL):
        expected = derive_oracle(srep, requested)
        if expected == "downgrade":
            with pytest.raises(LicenseDowngrade):
                derive_crep_license(srep, requested)
        else:
            assert derive_crep_license(srep, requested) is expected, (srep, requested)


def test_share_alike_source_must_be_taken_verbatim():
    with pytest.raises(LicenseDowngrade):
        derive_crep_license(License.CC_BY_SA, License.CC0)
    assert derive_crep_license(License.CC_BY_SA, License.CC_BY_SA) is License.CC_BY_SA


def test_cc0_source_imposes_nothing():
    assert derive_crep_license(License.CC0, License.CC_BY_NC_SA) is License.CC_BY_NC_SA
    assert derive_crep_license(License.CC0, License.CC0) is License.CC0


def test_compose_worked_example():
    assert compose_licenses([License.CC_BY, License.CC_BY_SA]) is License.CC_BY_SA


def test_compose_single_is_identity():
    for lic in ALL:
        assert compose_licenses([lic]) is lic


def test_compose_sa_with_nc_sa_is_incompatible():
    with pytest.raises(IncompatibleComposition) as exc:
        compose_licenses([License.CC_BY_SA, License.CC_BY_NC_SA])
    assert set(exc.value.pair) == {License.CC_BY_SA, License.CC_BY_NC_SA}


def test_all_two_element_compositions_match_oracle():
    for a, b in itertools.product(ALL, ALL):
        expected = compose_oracle([a, b])
        if expected == "incompatible":
            with pytest.raises(IncompatibleComposition):
                compose_licenses([a, b])
        else:
            assert compose_licenses([a, b]) is expected, (a, b)


def test_compose_empty_rejected():
    with pytest.raises(ValueError):
        compose_licenses([])


def _compose_maybe(licenses):
    try:
        return compose_licenses(licenses)
    except IncompatibleComposition:
        return None


@settings(max_examples=500, deadline=None)
@given(st.lists(st.sampled_from(ALL), min_size=1, max_size=6))
def test_compose_matches_oracle_and_is_commutative(licenses):
    expected = compose_oracle(licenses)
    got = _compose_maybe(licenses)
    assert got == (None if expected == "incompatible" else expected)
    assert _compose_maybe(list(reversed(licenses))) == got
    assert _compose_maybe(sorted(licenses, key=lambda l: l.value)) == got


@settings(max_examples=500, deadline=None)
@given(st.lists(st.sampled_from(ALL), min_size=1, max_size=4),
       st.lists(st.sampled_from(ALL), min_size=1, max_size=4))
def test_compose_associative_on_defined_domain(left, right):
    flat = _compose_maybe(left + right)
    left_first = _compose_maybe(left)
    nested = _compose_maybe([left_first] + right) if left_first else None
    if flat is not None and nested is not None:
        assert flat == nested


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ALL), st.integers(1, 5))
def test_compose_idempotent(lic, n):
    assert compose_licenses([lic] * n) is lic


def test_license_for_flags_and_parse():
    assert license_for_flags(frozenset()) is License.CC0
    assert license_for_flags(frozenset({SHARE_ALIKE})) is License.CC_BY_SA
    assert parse_license("cc-by-sa") is License.CC_BY_SA
    assert parse_license("CC_BY_NC_SA") is License.CC_BY_NC_SA
    with pytest.raises(ValueError):
        parse_license("CC-BY-ND")
