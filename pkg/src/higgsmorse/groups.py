"""Cartan data for the supported real reductive groups.

Each group is described by its maximal compact H, the complexification H^C,
the isotropy representation m^C and the shape of the Higgs field as bundle
maps between the summands of the standard vector bundle(s).
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class HiggsComponent:
    tag: str          # name of the component: phi, beta, gamma
    source: str
    target: str       # target before the K twist
    symmetry: str     # none, symmetric, symmetric traceless, traceless
    twist: str = "K"


@dataclass(frozen=True)
class GroupDatum:
    name: str                    # canonical display name, e.g. "Sp(4,R)"
    family: str                  # gl, sl, slr, sp, u
    params: tuple
    maximal_compact: str
    complexified_compact: str
    isotropy_rep: str
    isotropy_dim: int
    higgs_shape: tuple
    bundle_rank: int             # rank of the bundle the Hodge summands split

    @property
    def n(self):
        return self.params[0]


def _gl(n):
    return GroupDatum(
        f"GL({n},C)", "gl", (n,), f"U({n})", f"GL({n},C)", f"gl({n},C)", n * n,
        (HiggsComponent("phi", "V", "V", "none"),), n)


def _sl(n):
    return GroupDatum(
        f"SL({n},C)", "sl", (n,), f"SU({n})", f"SL({n},C)", f"sl({n},C)", n * n - 1,
        (HiggsComponent("phi", "V", "V", "traceless"),), n)


def _slr(n):
    return GroupDatum(
        f"SL({n},R)", "slr", (n,), f"SO({n})", f"SO({n},C)", f"Sym^2_0(C^{n})",
        n * (n + 1) // 2 - 1,
        (HiggsComponent("phi", "V", "V", "symmetric traceless"),), n)


def _sp(n):
    return GroupDatum(
        f"Sp({2 * n},R)", "sp", (n,), f"U({n})", f"GL({n},C)",
        f"Sym^2(C^{n}) + Sym^2((C^{n})*)", n * (n + 1),
        (HiggsComponent("beta", "V*", "V", "symmetric"),
         HiggsComponent("gamma", "V", "V*", "symmetric")), n)


def _u(p, q):
    return GroupDatum(
        f"U({p},{q})", "u", (p, q), f"U({p})xU({q})", f"GL({p},C)xGL({q},C)",
        f"Hom(C^{p},C^{q}) + Hom(C^{q},C^{p})", 2 * p * q,
        (HiggsComponent("beta", "V1", "V2", "none"),
         HiggsComponent("gamma", "V2", "V1", "none")), p + q)


def group_datum(family, n=None, p=None, q=None):
    """Build the datum for a family name with explicit integer parameters."""
    fam = family.lower()
    if fam == "u":
        if p is None or q is None or p < 1 or q < 1:
            raise ValidationError(f"U(p,q) needs p, q >= 1, got p={p}, q={q}")
        return _u(p, q)
    builders = {"gl": _gl, "sl": _sl, "slr": _slr, "sp": _sp}
    if fam not in builders:
        raise ValidationError(f"unsupported group family {family!r}")
    if n is None or n < 1:
        raise ValidationError(f"group {family} needs n >= 1, got {n}")
    return builders[fam](n)


_IDENTIFIERS = {
    r"gl\((\w+)\)": "gl",
    r"gl\((\w+),c\)": "gl",
    r"sl\((\w+)\)": "sl",
    r"sl\((\w+),c\)": "sl",
    r"sl\((\w+),r\)": "slr",
    r"sp\((\w+),r\)": "sp",
    r"u\((\w+),(\w+)\)": "u",
}


def parse_group(identifier, n=None, p=None, q=None):
    """Resolve a CLI identifier such as "sp(2n,R)" or "gl(3)".

    Symbolic slots (n, 2n, p, q) are filled from the keyword arguments; a
    literal number in the identifier wins when both are present and agree.
    """
    ident = identifier.strip().lower().replace(" ", "")
    for pattern, fam in _IDENTIFIERS.items():
        m = re.fullmatch(pattern, ident)
        if not m:
            continue
        if fam == "u":
            pp = _slot(m.group(1), {"p": p}, "p")
            qq = _slot(m.group(2), {"q": q}, "q")
            return group_datum("u", p=pp, q=qq)
        slot = m.group(1)
        if fam == "sp":
            if slot == "2n":
                return group_datum("sp", n=n)
            if slot.isdigit():
                size = int(slot)
                if size % 2:
                    raise ValidationError(f"Sp needs an even matrix size, got {size}")
                if n is not None and n != size // 2:
                    raise ValidationError(f"{identifier} conflicts with n={n}")
                return group_datum("sp", n=size // 2)
            raise ValidationError(f"cannot read group parameter in {identifier!r}")
        return group_datum(fam, n=_slot(slot, {"n": n}, "n"))
    raise ValidationError(f"unsupported group identifier {identifier!r}")


def _slot(text, given, name):
    if text.isdigit():
        v = int(text)
        if given[name] is not None and given[name] != v:
            raise ValidationError(f"group literal {v} conflicts with {name}={given[name]}")
        return v
    if text == name:
        if given[name] is None:
            raise ValidationError(f"group identifier needs --{name}")
        return given[name]
    raise ValidationError(f"cannot read group parameter {text!r}")


@dataclass(frozen=True)
class Involution:
    kind: str = "compact_conjugation_tau"   # or cartan_theta

    def __post_init__(self):
        if self.kind not in ("compact_conjugation_tau", "cartan_theta"):
            raise ValidationError(f"unknown involution kind {self.kind!r}")


def apply_involution(inv, u):
    """u -> -u^* in the standard representation (both kinds act this way here)."""
    u = np.asarray(u)
    if u.ndim < 2 or u.shape[-1] != u.shape[-2]:
        raise ValidationError(f"involution needs square matrices, got shape {u.shape}")
    return -np.conj(np.swapaxes(u, -1, -2))


def b_tau(u, v, inv=Involution()):
    """B_tau(u, v) = -tr(u tau(v)) with the trace form as B."""
    return -np.trace(np.asarray(u) @ apply_involution(inv, v))


def bracket(u, v):
    return u @ v - v @ u


def real_form_sample(datum, rng, integer=False):
    """Random element of the real Lie algebra of the group, in the standard
    representation.  With integer=True entries are small integers so identities
    can be checked exactly."""
    if integer:
        def real(shape):
            return rng.integers(-4, 5, size=shape).astype(np.int64)
    else:
        def real(shape):
            return rng.standard_normal(shape)
    fam = datum.family
    if fam in ("gl", "sl"):
        n = datum.n
        x = real((n, n)) + 1j * real((n, n))
        if fam == "sl":
            x[-1, -1] -= np.trace(x)
        return x
    if fam == "slr":
        n = datum.n
        x = real((n, n))
        x[-1, -1] -= np.trace(x)
        return x
    if fam == "sp":
        # Hamiltonian matrices [[a, b], [c, -a^T]] with b, c symmetric
        n = datum.n
        a, b, c = real((n, n)), real((n, n)), real((n, n))
        b = b + b.T
        c = c + c.T
        return np.block([[a, b], [c, -a.T]])
    if fam == "u":
        # X^* J + J X = 0 with J = diag(1_p, -1_q)
        p, q = datum.params
        ap = real((p, p)) + 1j * real((p, p))
        aq = real((q, q)) + 1j * real((q, q))
        ap = ap - ap.conj().T
        aq = aq - aq.conj().T
        z = real((p, q)) + 1j * real((p, q))
        return np.block([[ap, z], [z.conj().T, aq]])
    raise ValidationError(f"no sampler for {datum.name}")
