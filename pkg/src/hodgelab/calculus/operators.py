"""Operators on graded polynomial forms and a small word interpreter.

Every operator takes and returns a :class:`GradedForm`, so compositions such
as ``e^{-i_phi} o nabla o e^{i_phi}`` can mix bidegrees freely.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from . import forms as F
from .forms import Connection, ContractViolation, GradedForm, PolyForm


def dbar(x) -> GradedForm:
    return GradedForm.lift(x).map(F.dbar)


def del_(x) -> GradedForm:
    return GradedForm.lift(x).map(F.del_)


def nabla_prime(x, conn: Optional[Connection] = None) -> GradedForm:
    return GradedForm.lift(x).map(lambda f: F.nabla_prime(f, conn))


def nabla(x, conn: Optional[Connection] = None) -> GradedForm:
    return nabla_prime(x, conn) + dbar(x)


def contract(phi: PolyForm, x) -> GradedForm:
    return F.graded_contract(phi, x)


def i_power(phi: PolyForm, x, k: int) -> GradedForm:
    out = GradedForm.lift(x)
    for _ in range(k):
        out = contract(phi, out)
    return out


def lie(phi: PolyForm, x, part: str = "full", conn: Optional[Connection] = None) -> GradedForm:
    """L_phi = (-1)^k D o i_phi + i_phi o D with D = nabla', dbar or nabla.

    ``part`` is ``"holo"`` (D = nabla'), ``"antiholo"`` (D = dbar) or
    ``"full"`` (D = nabla); k is the antiholomorphic degree of phi.
    """
    if part == "holo":
        D = lambda y: nabla_prime(y, conn)  # noqa: E731
    elif part == "antiholo":
        D = dbar
    elif part == "full":
        D = lambda y: nabla(y, conn)  # noqa: E731
    else:
        raise ValueError(f"unknown Lie derivative part {part!r}")
    sign = -1 if phi.q % 2 else 1
    x = GradedForm.lift(x)
    return D(contract(phi, x)).scale(sign) + contract(phi, D(x))


def exp_contract(phi: PolyForm, x, sign: int = 1) -> GradedForm:
    return F.exp_contract(phi, x, sign)


def wedge_left(eta: PolyForm, x) -> GradedForm:
    return GradedForm.lift(x).map(lambda f: F.wedge(eta, f))


def bracket(phi: PolyForm, x) -> GradedForm:
    return GradedForm.lift(x).map(lambda f: F.bracket(phi, f))


# -- word interpreter ---------------------------------------------------------

_UNARY = {
    "dbar": lambda x, conn: dbar(x),
    "del": lambda x, conn: del_(x),
    "nabla": lambda x, conn: nabla(x, conn),
    "nabla'": lambda x, conn: nabla_prime(x, conn),
}

_PARAM = {
    "i": lambda phi, x, conn: contract(phi, x),
    "L": lambda phi, x, conn: lie(phi, x, "full", conn),
    "L10": lambda phi, x, conn: lie(phi, x, "holo", conn),
    "L01": lambda phi, x, conn: lie(phi, x, "antiholo", conn),
    "exp": lambda phi, x, conn: exp_contract(phi, x, 1),
    "exp-": lambda phi, x, conn: exp_contract(phi, x, -1),
    "wedge": lambda eta, x, conn: wedge_left(eta, x),
    "bracket": lambda phi, x, conn: bracket(phi, x),
}

TOKENS = tuple(_UNARY) + tuple(f"{k}:<name>" for k in _PARAM)


def apply_operator(
    word: Sequence[str],
    target,
    operands: Optional[Mapping[str, PolyForm]] = None,
    conn: Optional[Connection] = None,
) -> GradedForm:
    """Apply a word of operators to ``target``, composition order.

    ``["dbar", "i:phi"]`` means dbar o i_phi, so the rightmost token acts
    first.  Parametrised tokens name their operand, e.g. ``"L10:phi"`` or
    ``"wedge:eta"``, looked up in ``operands``.

    Raises
    ------
    ContractViolation
        with the 0-based word position of the first incompatible token.
    """
    operands = operands or {}
    x = GradedForm.lift(target)
    for pos in range(len(word) - 1, -1, -1):
        token = word[pos]
        try:
            if token in _UNARY:
                x = _UNARY[token](x, conn)
                continue
            name, _, arg = token.partition(":")
            if name not in _PARAM or not arg:
                raise ContractViolation(f"unknown operator token {token!r}")
            if arg not in operands:
                raise ContractViolation(f"operand {arg!r} not supplied")
            x = _PARAM[name](operands[arg], x, conn)
        except ContractViolation as exc:
            raise ContractViolation(f"word position {pos} ({token}): {exc}") from None
    return x
