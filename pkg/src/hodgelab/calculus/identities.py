"""Exact verification of the contraction/Lie-derivative operator identities.

Each tag pairs an instance generator with a check that evaluates the two
sides of an identity through separate code paths and reports their exact
difference.  Generators that need a hypothesis (integrability, closedness)
construct inputs satisfying it and re-verify the hypothesis exactly before
handing the instance out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional

import numpy as np

from .._rational import Q
from . import forms as F
from . import operators as O
from .forms import Connection, GradedForm, PolyForm
from .poly import SHIFT, Poly


class HypothesisError(ValueError):
    """An explicit instance does not satisfy the identity's hypothesis."""


@dataclass
class IdentityVerdict:
    tag: str
    seed: Optional[int]
    passed: bool
    differing_monomials: int
    details: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        return {
            "tag": self.tag,
            "seed": self.seed,
            "pass": self.passed,
            "differing_monomials": self.differing_monomials,
            **self.details,
        }


# -- random exact data ---------------------------------------------------------


class InstanceRng:
    """Random Gaussian-rational polynomial data from a seeded PCG64 stream.

    Numerators and denominators are bounded by 9 and monomials have total
    degree at most ``max_degree``.
    """

    def __init__(self, seed: int, max_degree: int = 3, max_terms: int = 2):
        self.gen = np.random.Generator(np.random.PCG64(seed))
        self.max_degree = max_degree
        self.max_terms = max_terms

    def rational(self) -> Q:
        num = int(self.gen.integers(-9, 10))
        den = int(self.gen.integers(1, 10))
        return Q(num, den)

    def gaussian(self, real_only: bool = False):
        re = self.rational()
        while re == 0:
            re = self.rational()
        if real_only or self.gen.random() < 0.5:
            return re, Q(0)
        return re, self.rational()

    def monomial_exponents(self, nvars: int, degree: int) -> List[int]:
        exps = [0] * nvars
        for _ in range(degree):
            exps[int(self.gen.integers(0, nvars))] += 1
        return exps

    def poly(self, n: int, max_degree: Optional[int] = None, terms: Optional[int] = None,
             variables: Optional[List[int]] = None) -> Poly:
        """Sparse random polynomial; ``variables`` restricts to some of z_1..z_n, zb_1..zb_n."""
        md = self.max_degree if max_degree is None else max_degree
        nt = int(self.gen.integers(1, self.max_terms + 1)) if terms is None else terms
        variables = list(range(2 * n)) if variables is None else variables
        out = Poly(n)
        for _ in range(nt):
            deg = int(self.gen.integers(0, md + 1))
            exps = self.monomial_exponents(len(variables), deg)
            key = 0
            for v, e in zip(variables, exps):
                key |= e << (SHIFT * v)
            out = out + Poly(n, {key: self.gaussian()})
        return out

    def form(self, n: int, p: int, q: int, kind: str = "scalar", rank: int = 1,
             density: float = 0.5, max_degree: Optional[int] = None) -> PolyForm:
        from .. import _exterior as ext

        values = [None] if kind == "scalar" else list(range(n if kind == "tangent" else rank))
        comps = {}
        keys = [(I, J, v) for I, J in ext.bidegree_components(n, p, q) for v in values]
        for key in keys:
            if self.gen.random() < density:
                comps[key] = self.poly(n, max_degree)
        if not comps and keys:
            key = keys[int(self.gen.integers(0, len(keys)))]
            comps[key] = self.poly(n, max_degree)
        return F.from_components(n, p, q, comps, kind, rank)

    def beltrami(self, n: int, q: int = 1, density: float = 0.4, max_degree: Optional[int] = None) -> PolyForm:
        return self.form(n, 0, q, "tangent", n, density, max_degree)

    def connection(self, n: int, rank: int) -> Connection:
        A = {}
        for a in range(rank):
            for b in range(rank):
                if self.gen.random() < 0.6:
                    A[(a, b)] = self.form(n, 1, 0, density=0.5, max_degree=2)
        return Connection(n, rank, A)

    def choice(self, options):
        return options[int(self.gen.integers(0, len(options)))]


# -- constructive hypothesis-satisfying data ---------------------------------


def dbar_homotopy(form: PolyForm) -> PolyForm:
    """Koszul homotopy in the antiholomorphic variables.

    On a monomial coefficient of zbar-degree b times dzbar^J (|J| = q >= 1)
    it returns (coefficient / (b + q)) times the contraction of dzbar^J with
    the radial field sum_j zbar_j d/dzbar_j.  Then dbar P + P dbar is the
    identity on forms of positive antiholomorphic degree.
    """
    n = form.n
    out: Dict = {}
    for (I, J, v), c in form.terms.items():
        for key, (re, im) in c.terms.items():
            b = sum((key >> (SHIFT * (n + j))) & 0xFF for j in range(n))
            weight = b + len(J)
            if weight == 0:
                continue
            for pos, j in enumerate(J):
                # dz^I ^ dzb^J: dzb^{j} sits after p + pos factors
                sign = (-1) ** ((len(I) + pos) & 1)
                newkey = key + (1 << (SHIFT * (n + j)))
                mono = Poly(n, {newkey: (re / weight * sign, im / weight * sign)})
                F._acc(out, (I, J[:pos] + J[pos + 1:], v), mono)
    return PolyForm(n, form.p, form.q - 1, form.kind, form.rank, out)


def omega_zero(n: int) -> PolyForm:
    return F.from_components(n, n, 0, {(tuple(range(n)), ()): 1})


def divergence_free_beltrami(rng: InstanceRng, n: int) -> PolyForm:
    """phi^i = dbar h^i with h^i = sum_j d_j a_ij, a antisymmetric.

    Then dbar phi = 0 and sum_i d_i phi^i = 0, i.e. d(phi -| Omega_0) = 0.
    """
    h = [Poly(n) for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a = rng.poly(n, max_degree=4, terms=3)
            h[i] = h[i] + a.d(j)
            h[j] = h[j] - a.d(i)
    comps = {}
    for i in range(n):
        for j in range(n):
            c = h[i].dbar(j)
            if c:
                comps[((), (j,), i)] = c
    return F.from_components(n, 0, 1, comps, "tangent", n)


def integrable_beltrami(rng: InstanceRng, n: int, kind: Optional[str] = None) -> PolyForm:
    """A (0,1) tangent form with dbar phi = 1/2 [phi, phi], built exactly.

    kinds: ``constant`` coefficients; ``separable`` sum_i g_i(z_i, zb_i) dzb_i (x) d_i;
    ``nilpotent`` (A dzb_a + B dzb_b) with A = alpha X + gamma Z, B = beta Y,
    X = c d_i, Y = c' z_i d_j, Z = d_j, alpha = alpha(zb_a), beta = beta(zb_b)
    and d_{zb_b} gamma = -alpha beta c c'; this has a nonzero bracket.
    """
    kind = kind or rng.choice(["constant", "separable", "nilpotent", "nilpotent"])
    comps: Dict = {}
    if kind == "constant":
        for i in range(n):
            for j in range(n):
                if rng.gen.random() < 0.5:
                    comps[((), (j,), i)] = Poly.const(n, rng.gaussian())
    elif kind == "separable":
        for i in range(n):
            comps[((), (i,), i)] = rng.poly(n, max_degree=3, variables=[i, n + i])
    elif kind == "nilpotent":
        i, j = (int(x) for x in rng.gen.permutation(n)[:2])
        a, b = (int(x) for x in rng.gen.permutation(n)[:2])
        c1, c2 = rng.gaussian(), rng.gaussian()
        alpha = rng.poly(n, max_degree=2, variables=[n + a])
        beta = rng.poly(n, max_degree=1, variables=[n + b])
        # antiderivative of beta in zb_b
        prim = dbar_homotopy(F.from_components(n, 0, 1, {((), (b,)): beta}))
        prim_poly = prim.terms.get(((), (), None), Poly(n))
        gamma = -(alpha * prim_poly).scale(c1).scale(c2)
        gamma = gamma + rng.poly(n, max_degree=2, variables=[n + a])
        zi = Poly.var(n, i)
        F._acc(comps, ((), (a,), i), alpha.scale(c1))
        F._acc(comps, ((), (a,), j), gamma)
        F._acc(comps, ((), (b,), j), (zi * beta).scale(c2))
    else:
        raise ValueError(f"unknown integrable kind {kind!r}")
    phi = F.from_components(n, 0, 1, comps, "tangent", n)
    if not is_integrable(phi):
        raise HypothesisError(f"{kind} construction is not integrable")
    return phi


def integrability_defect(phi: PolyForm) -> PolyForm:
    return F.dbar(phi) - F.bracket(phi, phi).scale(Q(1, 2))


def is_integrable(phi: PolyForm) -> bool:
    return integrability_defect(phi).is_zero()


def maurer_cartan_family(rng: InstanceRng, n: int, K: int) -> List[PolyForm]:
    """phi_1..phi_K with dbar phi_1 = 0 and dbar phi_v = 1/2 sum_{a+b=v} [phi_a, phi_b].

    phi_1 = dbar h, and each later term applies the dbar homotopy to the
    (dbar-closed) bracket sum, one step of the recursion at a time.
    """
    for _ in range(50):
        comps = {}
        for i in range(n):
            h = rng.poly(n, max_degree=3, terms=2)
            for j in range(n):
                c = h.dbar(j)
                if c:
                    comps[((), (j,), i)] = c
        first = F.from_components(n, 0, 1, comps, "tangent", n)
        if not F.bracket(first, first).is_zero():
            break
    phis = [first]
    for v in range(2, K + 1):
        total = bracket_sum(phis, v)
        phis.append(dbar_homotopy(total).scale(Q(1, 2)))
    check_maurer_cartan(phis)
    return phis


def bracket_sum(phis: List[PolyForm], v: int) -> PolyForm:
    """sum_{a+b=v} [phi_a, phi_b] over ordered pairs, 1-based orders."""
    n = phis[0].n
    total = F.zero(n, 0, 2, "tangent", n)
    for a in range(1, v):
        total = total + F.bracket(phis[a - 1], phis[v - a - 1])
    return total


def check_maurer_cartan(phis: List[PolyForm]) -> None:
    if not F.dbar(phis[0]).is_zero():
        raise HypothesisError("first term is not dbar-closed")
    for v in range(2, len(phis) + 1):
        lhs = F.dbar(phis[v - 1])
        rhs = bracket_sum(phis, v).scale(Q(1, 2))
        if not (lhs - rhs).is_zero():
            raise HypothesisError(f"recursion fails at order {v}")


# -- the identities -------------------------------------------------------------


def _module_setup(rng: InstanceRng, n: int):
    rank = int(rng.gen.integers(1, 3))
    return rank, rng.connection(n, rank)


def _random_module_form(rng: InstanceRng, n: int, rank: int, p: Optional[int] = None,
                        q: Optional[int] = None) -> PolyForm:
    p = int(rng.gen.integers(1, n + 1)) if p is None else p
    q = int(rng.gen.integers(0, n)) if q is None else q
    return rng.form(n, p, q, "module", rank, density=0.35, max_degree=2)


def _diff(lhs, rhs) -> GradedForm:
    return GradedForm.lift(lhs) - GradedForm.lift(rhs)


def _contraction_anticommute(rng, n):
    q = int(rng.gen.integers(1, 3))
    s = int(rng.gen.integers(1, 3))
    phi, psi = rng.beltrami(n, q), rng.beltrami(n, s)
    rank, _ = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank, p=int(rng.gen.integers(2, n + 1)), q=0)
    sign = -1 if ((q + 1) * (s + 1)) % 2 else 1
    lhs = O.contract(phi, O.contract(psi, alpha))
    rhs = O.contract(psi, O.contract(phi, alpha)).scale(sign)
    return _diff(lhs, rhs), {"q": q, "s": s}


def _lie_contraction_commutator(rng, n):
    k = int(rng.gen.integers(1, 3))
    kp = int(rng.gen.integers(1, 3))
    phi, phip = rng.beltrami(n, k), rng.beltrami(n, kp)
    rank, conn = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank)
    s1 = -1 if kp % 2 else 1
    s2 = -1 if (kp * k + 1) % 2 else 1
    lhs = O.contract(phi, O.lie(phip, alpha, "full", conn)).scale(s1) + O.lie(
        phip, O.contract(phi, alpha), "full", conn
    ).scale(s2)
    rhs = O.contract(F.bracket(phi, phip), alpha)
    return _diff(lhs, rhs), {"k": k, "k_prime": kp, "rank": rank}


def _commutator_holomorphic(rng, n):
    phi, phip = rng.beltrami(n), rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank)
    D = lambda x: O.nabla_prime(x, conn)  # noqa: E731
    i = O.contract
    rhs = (
        -D(i(phip, i(phi, alpha)))
        - i(phi, i(phip, D(alpha)))
        + i(phi, D(i(phip, alpha)))
        + i(phip, D(i(phi, alpha)))
    )
    lhs = O.contract(F.bracket(phi, phip), alpha)
    return _diff(lhs, rhs), {"rank": rank}


def _commutator_antiholomorphic(rng, n):
    phi, phip = rng.beltrami(n), rng.beltrami(n)
    rank, _ = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank)
    D, i = O.dbar, O.contract
    rhs = -D(i(phip, i(phi, alpha))) - i(phi, i(phip, D(alpha))) + i(phi, D(i(phip, alpha))) + i(
        phip, D(i(phi, alpha))
    )
    return _diff(GradedForm(), rhs), {"rank": rank}


def _tian_todorov(rng, n):
    phi, psi = rng.beltrami(n), rng.beltrami(n)
    Omega = rng.form(n, n, 0, density=1.0, max_degree=3)
    i, D = O.contract, O.del_
    lhs = i(F.bracket(phi, psi), Omega)
    rhs = -D(i(psi, i(phi, Omega))) + i(phi, D(i(psi, Omega))) + i(psi, D(i(phi, Omega)))
    return _diff(lhs, rhs), {}


def _tian_todorov_cy(rng, n):
    for _ in range(20):
        phi, psi = divergence_free_beltrami(rng, n), divergence_free_beltrami(rng, n)
        if not F.bracket(phi, psi).is_zero():
            break
    Om = omega_zero(n)
    for x in (phi, psi):
        if not F.dbar(x).is_zero() or not F.del_(F.contract(x, Om)).is_zero():
            raise HypothesisError("tian-todorov-cy instance is not closed")
    lhs = O.contract(F.bracket(phi, psi), Om)
    rhs = -O.del_(O.contract(psi, O.contract(phi, Om)))
    return _diff(lhs, rhs), {"bracket_nonzero": not F.bracket(phi, psi).is_zero()}


def _graded_module_input(rng, n, rank):
    pieces = [_random_module_form(rng, n, rank) for _ in range(int(rng.gen.integers(1, 3)))]
    return GradedForm.of(*pieces)


def _conjugated_dbar(rng, n):
    phi = rng.beltrami(n)
    rank, _ = _module_setup(rng, n)
    alpha = _graded_module_input(rng, n, rank)
    lhs = O.exp_contract(phi, O.dbar(O.exp_contract(phi, alpha, 1)), -1)
    rhs = O.dbar(alpha) - O.lie(phi, alpha, "antiholo")
    return _diff(lhs, rhs), {"rank": rank}


def _conjugated_nabla_prime(rng, n):
    phi = rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    alpha = _graded_module_input(rng, n, rank)
    lhs = O.exp_contract(phi, O.nabla_prime(O.exp_contract(phi, alpha, 1), conn), -1)
    half = F.bracket(phi, phi).scale(Q(1, 2))
    rhs = O.nabla_prime(alpha, conn) - O.lie(phi, alpha, "holo", conn) - O.contract(half, alpha)
    return _diff(lhs, rhs), {"rank": rank}


def _conjugated_connection(rng, n):
    phi = rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    alpha = _graded_module_input(rng, n, rank)
    lhs = O.exp_contract(phi, O.nabla(O.exp_contract(phi, alpha, 1), conn), -1)
    half = F.bracket(phi, phi).scale(Q(1, 2))
    rhs = O.nabla(alpha, conn) - O.lie(phi, alpha, "full", conn) - O.contract(half, alpha)
    return _diff(lhs, rhs), {"rank": rank}


def _conjugated_integrable(rng, n):
    phi = integrable_beltrami(rng, n)
    rank, conn = _module_setup(rng, n)
    alpha = _graded_module_input(rng, n, rank)
    inner = lambda x: O.dbar(x) - O.lie(phi, x, "full", conn)  # noqa: E731
    lhs = O.dbar(alpha) - O.lie(phi, alpha, "holo", conn)
    rhs = O.exp_contract(phi, inner(O.exp_contract(phi, alpha, 1)), -1)
    return _diff(lhs, rhs), {"rank": rank, "bracket_nonzero": not F.bracket(phi, phi).is_zero()}


def _power_commutator(rng, n, k=None):
    k = int(rng.gen.integers(2, n + 2)) if k is None else k
    phi = rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank)
    D = lambda x: O.nabla_prime(x, conn)  # noqa: E731
    ip = lambda x, m: O.i_power(phi, x, m)  # noqa: E731
    br = F.bracket(phi, phi)
    Fk = (
        ip(D(O.contract(phi, alpha)), k - 1).scale(-k)
        + ip(D(alpha), k).scale(k - 1)
        + D(ip(alpha, k))
        + ip(O.contract(br, alpha), k - 2).scale(comb(k, 2))
    )
    return Fk, {"k": k, "rank": rank}


def _power_commutator_bracket(rng, n, k=None):
    k = int(rng.gen.integers(2, n + 2)) if k is None else k
    phi = rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    alpha = _random_module_form(rng, n, rank)
    D = lambda x: O.nabla_prime(x, conn)  # noqa: E731
    ip = lambda x, m: O.i_power(phi, x, m)  # noqa: E731
    lhs = D(ip(alpha, k)) - ip(D(alpha), k)
    comm1 = D(O.contract(phi, alpha)) - O.contract(phi, D(alpha))
    rhs = ip(comm1, k - 1).scale(k) - ip(O.contract(F.bracket(phi, phi), alpha), k - 2).scale(comb(k, 2))
    return _diff(lhs, rhs), {"k": k, "rank": rank}


def _deformed_differential(rng, n):
    phi = rng.beltrami(n)
    rank, conn = _module_setup(rng, n)
    sigma = _random_module_form(rng, n, rank, p=n)
    lhs = O.exp_contract(phi, O.nabla(O.exp_contract(phi, sigma, 1), conn), -1)
    defect = integrability_defect(phi)
    rhs = O.dbar(sigma) + O.nabla_prime(O.contract(phi, sigma), conn) + O.contract(defect, sigma)
    return _diff(lhs, rhs), {"rank": rank}


def _deformed_differential_integrable(rng, n):
    phi = integrable_beltrami(rng, n)
    rank, conn = _module_setup(rng, n)
    sigma = _random_module_form(rng, n, rank, p=n)
    lhs = O.exp_contract(phi, O.nabla(O.exp_contract(phi, sigma, 1), conn), -1)
    rhs = O.dbar(sigma) + O.nabla_prime(O.contract(phi, sigma), conn)
    return _diff(lhs, rhs), {"rank": rank}


def _bracket_sum_closed(rng, n):
    K = int(rng.gen.integers(2, 4))
    phis = maurer_cartan_family(rng, n, K)
    total = F.zero(n, 0, 2, "tangent", n)
    for v in range(1, K + 1):
        total = total + F.bracket(phis[v - 1], phis[K - v])
    return GradedForm.of(F.dbar(total)), {"K": K, "sum_nonzero": not total.is_zero()}


IDENTITIES: Dict[str, Callable] = {
    "contraction-anticommute": _contraction_anticommute,
    "lie-contraction-commutator": _lie_contraction_commutator,
    "commutator-holomorphic-expansion": _commutator_holomorphic,
    "commutator-antiholomorphic-expansion": _commutator_antiholomorphic,
    "tian-todorov": _tian_todorov,
    "tian-todorov-cy": _tian_todorov_cy,
    "conjugated-dbar": _conjugated_dbar,
    "conjugated-nabla-prime": _conjugated_nabla_prime,
    "conjugated-connection": _conjugated_connection,
    "conjugated-integrable": _conjugated_integrable,
    "power-commutator": _power_commutator,
    "power-commutator-bracket": _power_commutator_bracket,
    "deformed-differential": _deformed_differential,
    "deformed-differential-integrable": _deformed_differential_integrable,
    "bracket-sum-closed": _bracket_sum_closed,
}

TAGS = tuple(IDENTITIES)


def verify_identity(tag: str, seed: int, n: Optional[int] = None, **kwargs) -> IdentityVerdict:
    """Draw one hypothesis-satisfying instance for ``tag`` and check it exactly.

    ``n`` defaults to a draw from {2, 3}.  Extra keyword arguments go to the
    check (``k`` for the power-commutator tags).
    """
    if tag not in IDENTITIES:
        raise KeyError(f"unknown identity tag {tag!r}; known: {', '.join(TAGS)}")
    rng = InstanceRng(seed)
    if n is None:
        n = int(rng.gen.integers(2, 4))
    diff, details = IDENTITIES[tag](rng, n, **kwargs)
    diff = GradedForm.lift(diff)
    count = diff.monomial_count()
    return IdentityVerdict(tag, seed, count == 0, count, {"n": n, **details})


def verify_all(instances: int = 50, base_seed: int = 0, tags=TAGS) -> List[IdentityVerdict]:
    out = []
    for t, tag in enumerate(tags):
        for j in range(instances):
            out.append(verify_identity(tag, base_seed + 1000 * t + j))
    return out
