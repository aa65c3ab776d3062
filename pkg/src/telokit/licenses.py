"""Creative-Commons license derivation and composition for catalog tiers.

Licenses are modelled by their restriction flags (attribution, non-commercial,
share-alike). Content-tier derivation follows the per-source-license rules;
distribution-tier composition is the least upper bound under flag union, with
the single named incompatibility: a share-alike source without NC cannot be
composed with the NC share-alike license.
"""

from __future__ import annotations

from enum import Enum

from .errors import IncompatibleComposition, LicenseDowngrade

ATTRIBUTION = "attribution"
NON_COMMERCIAL = "non_commercial"
SHARE_ALIKE = "share_alike"


class License(Enum):
    CC0 = "CC0"
    CC_BY = "CC-BY"
    CC_BY_NC = "CC-BY-NC"
    CC_BY_SA = "CC-BY-SA"
    CC_BY_NC_SA = "CC-BY-NC-SA"

    @property
    def flags(self) -> frozenset[str]:
        return _FLAGS[self]

    @property
    def attribution(self) -> bool:
        return ATTRIBUTION in self.flags

    @property
    def non_commercial(self) -> bool:
        return NON_COMMERCIAL in self.flags

    @property
    def share_alike(self) -> bool:
        return SHARE_ALIKE in self.flags


_FLAGS = {
    License.CC0: frozenset(),
    License.CC_BY: frozenset({ATTRIBUTION}),
    License.CC_BY_NC: frozenset({ATTRIBUTION, NON_COMMERCIAL}),
    License.CC_BY_SA: frozenset({ATTRIBUTION, SHARE_ALIKE}),
    License.CC_BY_NC_SA: frozenset({ATTRIBUTION, NON_COMMERCIAL, SHARE_ALIKE}),
}

_BY_FLAGS = {flags: lic for lic, flags in _FLAGS.items()}


def license_for_flags(flags: frozenset[str]) -> License:
    normalized = frozenset(flags | {ATTRIBUTION}) if flags else frozenset(flags)
    if normalized not in _BY_FLAGS:
        raise ValueError(f"no license for flags {sorted(flags)}")
    return _BY_FLAGS[normalized]


def parse_license(text: str) -> License:
    t = text.strip().upper().replace("_", "-")
    for lic in License:
        if lic.value == t or lic.name == text.strip().upper().replace("-", "_"):
            return lic
    raise ValueError(f"unknown license {text!r}")


def derive_crep_license(srep: License, requested: License) -> License:
    """License of a content-tier resource derived from its source tier.

    CC0 sources impose nothing; CC-BY forces attribution; CC-BY-NC forces
    attribution and rejects any requested license that drops non-commercial;
    share-alike sources must be taken verbatim.
    """
    if srep.share_alike:
        if requested is not srep:
            raise LicenseDowngrade(
                f"source license {srep.value} must be taken as-is, not {requested.value}"
            )
        return srep
    if srep.non_commercial and not requested.non_commercial:
        raise LicenseDowngrade(
            f"source license {srep.value} forces non-commercial; "
            f"{requested.value} drops it"
        )
    if srep is License.CC0:
        return requested
    # CC-BY (and the NC case that passed the check): force the source flags on.
    return license_for_flags(requested.flags | srep.flags)


def compose_licenses(licenses: list[License]) -> License:
    """Least upper bound under flag union for a composed distribution.

    The composed resource is distributed under the most restrictive
    ("most expressive") member of the lattice covering all inputs.
    """
    if not licenses:
        raise ValueError("cannot compose an empty license list")
    present = set(licenses)
    if License.CC_BY_SA in present and License.CC_BY_NC_SA in present:
        raise IncompatibleComposition((License.CC_BY_SA, License.CC_BY_NC_SA))
    flags: frozenset[str] = frozenset()
    for lic in licenses:
        flags |= lic.flags
    return license_for_flags(flags)
