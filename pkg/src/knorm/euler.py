"""Partial Euler-Poincare characteristics of open index-p subgroups.

The pro-p groups themselves never appear: a subgroup is represented by
the cohomology profile (h_i, a_i, d_i) of its field data, where h_i is
the dimension of the degree-i cohomology of the ambient group, a_i the
dimension of the annihilator of the defining class, and d_i the
codimension.  Three formulas give the subgroup's cohomology dimensions;
on local-field instances they are cross-checked against each other and
against the extension's K-groups computed directly, and the two
characteristic identities are verified exactly.
"""

from __future__ import annotations

from .errors import InputError, MathCheckError, UnsupportedOperationError
from .fplin import Subspace
from .milnor import (
    ann_cup,
    class_of,
    cup_with,
    get_extension,
    k_dim,
    k_group,
    norm_map,
    norm_subgroup,
    xi_class,
)
from .padic import KummerExtension, LocalField
from .structure import compute_invariants

__all__ = [
    "CohomologyProfile",
    "EPReport",
    "profile_from_field",
    "profile_from_manual",
    "chi",
    "dim_HN_formula",
    "theorem3_check",
    "corollary_checks",
    "enumerate_extension_classes",
]


class CohomologyProfile:
    """The sequences h_0..h_n, a_1..a_n, d_0..d_n for one subgroup.

    h_0 = 1 always, and a_0 = 0 because the defining class is nonzero,
    so d_0 = 1.  Constructed either from a Kummer extension of a local
    field or from manual data; manual profiles must state explicitly
    whether -1 is a norm when p = 2 (it is never inferred).
    """

    __slots__ = ("p", "n", "h", "a", "d", "source", "ext", "minus_one_norm", "label")

    def __init__(self, p, n, h, a, source, ext=None, minus_one_norm=None, label=""):
        if n < 0:
            raise InputError("top degree must be nonnegative")
        h = [int(v) for v in h]
        a = [int(v) for v in a]
        if len(h) != n + 1:
            raise InputError(f"h must list degrees 0..{n}")
        if len(a) != n:
            raise InputError(f"a must list degrees 1..{n}")
        if h[0] != 1:
            raise InputError("h_0 must be 1")
        if any(v < 0 for v in h + a):
            raise InputError("profile entries must be nonnegative")
        d = [1] + [h[i] - a[i - 1] for i in range(1, n + 1)]
        if any(v < 0 for v in d):
            raise InputError("a_i may not exceed h_i")
        self.p, self.n = p, n
        self.h, self.a, self.d = h, a, d
        self.source = source
        self.ext = ext
        self.minus_one_norm = minus_one_norm
        self.label = label

    def a_at(self, i: int) -> int:
        if i == 0:
            return 0
        return self.a[i - 1]

    def d_at(self, i: int) -> int:
        if i < 0:
            return 0
        return self.d[i]

    def licensed_for_free_formula(self) -> bool:
        """Whether the free-submodule formulas apply: odd p, or p = 2 with
        -1 a norm from the defining extension."""
        if self.p > 2:
            return True
        if self.minus_one_norm is None:
            raise InputError(
                "manual p = 2 profiles must declare minus_one_norm for this formula"
            )
        return bool(self.minus_one_norm)

    def as_dict(self) -> dict:
        out = {
            "p": self.p,
            "n": self.n,
            "h": list(self.h),
            "a": list(self.a),
            "d": list(self.d),
            "source": self.source,
        }
        if self.minus_one_norm is not None:
            out["minus_one_norm"] = self.minus_one_norm
        if self.label:
            out["label"] = self.label
        return out

    def __repr__(self) -> str:
        return f"CohomologyProfile(p={self.p}, n={self.n}, h={self.h}, a={self.a})"


def profile_from_field(ext: KummerExtension, n: int) -> CohomologyProfile:
    """Profile of the subgroup fixing E, with h_i the K-group dimensions
    and a_i the annihilator dimensions of the defining class."""
    field = ext.base
    a_cls = class_of(field, ext.a)
    h = [k_dim(field, i) for i in range(n + 1)]
    a = [ann_cup(field, a_cls, i + 1).dim for i in range(1, n + 1)]
    minus_one = None
    if field.p == 2:
        minus_one = norm_subgroup(ext).contains(class_of(field, field.element(-1)).coords)
    return CohomologyProfile(
        field.p, n, h, a, "local_field", ext=ext, minus_one_norm=minus_one,
        label=ext.label or "",
    )


def profile_from_manual(spec: dict) -> CohomologyProfile:
    """Manual profile from the JSON structure
    {"p":., "n":., "h":[..], "a":[..], "minus_one_norm":bool?}."""
    if not isinstance(spec, dict):
        raise InputError("manual profile must be an object")
    extra = set(spec) - {"p", "n", "h", "a", "minus_one_norm", "label"}
    if extra:
        raise InputError(f"unknown manual-profile keys: {sorted(extra)}")
    for key in ("p", "n", "h", "a"):
        if key not in spec:
            raise InputError(f"manual profile is missing {key!r}")
    return CohomologyProfile(
        int(spec["p"]), int(spec["n"]), spec["h"], spec["a"], "manual",
        minus_one_norm=spec.get("minus_one_norm"), label=spec.get("label", ""),
    )


def dim_HN_formula(profile: CohomologyProfile, i: int, variant: str = "c") -> int:
    """Dimension of the subgroup's degree-i cohomology.

    Variant 'c' uses d_{i-1} + d_i + p(a_i - d_{i-1}) from the profile
    alone; 'b' uses p times the free rank (the y invariant), licensed by
    odd p or -1 being a norm; 'a' uses the codimension of the cup-product
    image inside the corestriction image, and needs field data.
    """
    if i < 0 or i > profile.n:
        raise InputError(f"degree {i} outside the profile range 0..{profile.n}")
    if i == 0:
        return 1
    p = profile.p
    base = profile.d_at(i - 1) + profile.d_at(i)
    if variant == "c":
        return base + p * (profile.a_at(i) - profile.d_at(i - 1))
    if variant == "b":
        if not profile.licensed_for_free_formula():
            raise InputError("variant 'b' needs odd p, or p = 2 with -1 a norm")
        if profile.source == "local_field":
            y = compute_invariants(profile.ext, i).y
        else:
            y = profile.a_at(i) - profile.d_at(i - 1)
        return base + p * y
    if variant == "a":
        if profile.source != "local_field":
            raise InputError("variant 'a' needs local-field data")
        ext = profile.ext
        field = ext.base
        cor_image = norm_map(ext, i).image() if i <= 3 else Subspace.zero(p, k_dim(field, i))
        a_cls = class_of(field, ext.a)
        cup_img = (cup_with(field, a_cls, i).image() if 1 <= i <= 3
                   else Subspace.zero(p, k_dim(field, i)))
        # the quotient of the corestriction image by the cup image is read
        # as a dimension difference: for p = 2 the cup image need not be
        # contained in the corestriction image
        return base + p * (cor_image.dim - cup_img.dim)
    raise InputError(f"unknown variant {variant!r}")


def chi(profile: CohomologyProfile, which: str) -> int:
    """Partial Euler-Poincare characteristic up to the profile degree:
    'T' for the ambient group, 'N' for the subgroup (via variant 'c')."""
    if which == "T":
        return sum((-1) ** i * profile.h[i] for i in range(profile.n + 1))
    if which == "N":
        return sum((-1) ** i * dim_HN_formula(profile, i, "c") for i in range(profile.n + 1))
    raise InputError("which must be 'T' or 'N'")


class EPReport:
    """The two characteristic identities on one profile, held exactly."""

    __slots__ = (
        "profile", "chi_T", "chi_N", "chi_free_N", "dim_HN",
        "identity_a_lhs", "identity_a_rhs", "identity_a_ok",
        "identity_b_lhs", "identity_b_rhs", "identity_b_ok",
        "variants_agree",
    )

    def __init__(self, profile, chi_T, chi_N, chi_free_N, dim_HN,
                 a_lhs, a_rhs, b_lhs, b_rhs, variants_agree):
        self.profile = profile
        self.chi_T = chi_T
        self.chi_N = chi_N
        self.chi_free_N = chi_free_N
        self.dim_HN = dim_HN
        self.identity_a_lhs = a_lhs
        self.identity_a_rhs = a_rhs
        self.identity_a_ok = a_lhs == a_rhs
        self.identity_b_lhs = b_lhs
        self.identity_b_rhs = b_rhs
        self.identity_b_ok = (b_lhs == b_rhs) if b_lhs is not None else None
        self.variants_agree = variants_agree

    @property
    def ok(self) -> bool:
        checks = [self.identity_a_ok]
        if self.identity_b_ok is not None:
            checks.append(self.identity_b_ok)
        if self.variants_agree is not None:
            checks.append(self.variants_agree)
        return all(checks)

    def as_dict(self) -> dict:
        return {
            "profile": self.profile.as_dict(),
            "chi_T": self.chi_T,
            "chi_N": self.chi_N,
            "chi_free_N": self.chi_free_N,
            "dim_HN": self.dim_HN,
            "identity_a": {"lhs": self.identity_a_lhs, "rhs": self.identity_a_rhs,
                           "ok": self.identity_a_ok},
            "identity_b": {"lhs": self.identity_b_lhs, "rhs": self.identity_b_rhs,
                           "ok": self.identity_b_ok},
            "variants_agree": self.variants_agree,
            "status": "pass" if self.ok else "fail",
        }


def theorem3_check(profile: CohomologyProfile) -> EPReport:
    """Verify p*chi(T) - chi(N) = (-1)^n (p-1) d_n, and, when licensed,
    chi(N) = chi_free(N) + (-1)^n d_n, all as exact integer identities.

    On local-field profiles the three dimension variants are also
    required to agree with each other and with the K-groups of the
    extension computed directly.
    """
    p, n = profile.p, profile.n
    chi_T = chi(profile, "T")
    dims = [dim_HN_formula(profile, i, "c") for i in range(n + 1)]
    chi_N = sum((-1) ** i * v for i, v in enumerate(dims))
    d_n = profile.d_at(n)
    a_lhs = p * chi_T - chi_N
    a_rhs = (-1) ** n * (p - 1) * d_n
    variants_agree = None
    if profile.source == "local_field":
        variants_agree = True
        top = profile.ext.top
        for i in range(1, n + 1):
            direct = k_dim(top, i)
            va = dim_HN_formula(profile, i, "a")
            agree = dims[i] == direct and va == dims[i]
            try:
                vb = dim_HN_formula(profile, i, "b")
                agree = agree and vb == dims[i]
            except InputError:
                pass  # unlicensed p = 2 instance
            variants_agree = variants_agree and agree
    b_lhs = b_rhs = None
    chi_free = None
    try:
        licensed = profile.licensed_for_free_formula()
    except InputError:
        licensed = False
    if licensed:
        chi_free = p * sum(
            (-1) ** i * (profile.a_at(i) - profile.d_at(i - 1)) for i in range(1, n + 1)
        )
        b_lhs = chi_N
        b_rhs = chi_free + (-1) ** n * d_n
    return EPReport(profile, chi_T, chi_N, chi_free, dims, a_lhs, a_rhs, b_lhs, b_rhs,
                    variants_agree)


def enumerate_extension_classes(field: LocalField) -> list[KummerExtension]:
    """All Kummer extensions of the field, one per line of k_1.

    The count is (p^dim - 1)/(p - 1); enumeration is refused above
    dimension 8 where it stops being desk-sized.
    """
    grp = k_group(field, 1)
    if grp.dim > 8:
        raise UnsupportedOperationError(
            f"enumerating {(field.p**grp.dim - 1) // (field.p - 1)} extensions "
            "is above the supported size"
        )
    exts = []
    seen = set()
    for cls in grp.classes():
        if cls.is_zero():
            continue
        coords = [int(c) for c in cls.coords]
        lead = next(c for c in coords if c)
        inv = pow(lead, -1, field.p)
        key = tuple((c * inv) % field.p for c in coords)
        if key in seen:
            continue
        seen.add(key)
        exts.append(get_extension(field, cls))
    expected = (field.p**grp.dim - 1) // (field.p - 1)
    if len(exts) != expected:
        raise MathCheckError(f"enumerated {len(exts)} extensions, expected {expected}")
    return exts


class CorollaryReport:
    """Per-subgroup equivalences and the cohomological-dimension probe."""

    __slots__ = ("n", "rows", "equivalences_ok", "all_doubling", "count")

    def __init__(self, n, rows):
        self.n = n
        self.rows = rows
        self.equivalences_ok = all(r["equivalence_ok"] for r in rows)
        self.all_doubling = all(r["chi_doubles"] for r in rows)
        self.count = len(rows)

    @property
    def ok(self) -> bool:
        return self.equivalences_ok

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "per_subgroup": self.rows,
            "equivalences_ok": self.equivalences_ok,
            "all_doubling": self.all_doubling,
        }


def corollary_checks(profiles: list[CohomologyProfile],
                     expected_count: int | None = None) -> CorollaryReport:
    """Per profile, the equivalence of chi_n(N) = p chi_n(T) with the
    surjectivity of corestriction (d_n = 0), plus the aggregate probe:
    doubling for every subgroup detects cohomological dimension <= n."""
    if not profiles:
        raise InputError("corollary checks need at least one profile")
    if expected_count is not None and len(profiles) != expected_count:
        raise InputError(
            f"incomplete enumeration: {len(profiles)} profiles, expected {expected_count}"
        )
    n = profiles[0].n
    rows = []
    for prof in profiles:
        if prof.n != n:
            raise InputError("profiles must share the top degree")
        p = prof.p
        chi_T = chi(prof, "T")
        chi_N = chi(prof, "N")
        doubles = chi_N == p * chi_T
        cor_onto = prof.d_at(n) == 0
        row = {
            "label": prof.label,
            "chi_T": chi_T,
            "chi_N": chi_N,
            "d_n": prof.d_at(n),
            "chi_doubles": doubles,
            "cor_surjective": cor_onto,
            "equivalence_ok": doubles == cor_onto,
        }
        try:
            if prof.licensed_for_free_formula():
                rep = theorem3_check(prof)
                row["chi_free"] = rep.chi_free_N
                row["free_equivalence_ok"] = (chi_N == rep.chi_free_N) == doubles
        except InputError:
            pass
        rows.append(row)
    return CorollaryReport(n, rows)
