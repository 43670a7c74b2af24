"""Security labels, gradual labels, and security types, together with the
predicates (subtyping, consistency, consistent subtyping) and operators
(gradual meet, consistent join/meet, merge, stamping) defined over them.

All predicates and operators are overloaded over three layers: gradual
labels, raw types, and labeled types.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union


class InternalError(Exception):
    """An operator was called outside its precondition; caller bug."""


class Label(Enum):
    LOW = "low"
    HIGH = "high"

    def __repr__(self):
        return self.value

    def __str__(self):
        return self.value


LOW = Label.LOW
HIGH = Label.HIGH


class Star:
    """The statically unknown security label."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"


STAR = Star()

GLabel = Union[Label, Star]


def is_star(g: GLabel) -> bool:
    return isinstance(g, Star)


def leq(l1: Label, l2: Label) -> bool:
    return l1 is LOW or l2 is HIGH


def join(l1: Label, l2: Label) -> Label:
    return HIGH if (l1 is HIGH or l2 is HIGH) else LOW


def meet(l1: Label, l2: Label) -> Label:
    return LOW if (l1 is LOW or l2 is LOW) else HIGH


@dataclass(frozen=True)
class UnitT:
    def __repr__(self):
        return "Unit"


@dataclass(frozen=True)
class BoolT:
    def __repr__(self):
        return "Bool"


@dataclass(frozen=True)
class RefT:
    ty: "Ty"

    def __repr__(self):
        return f"(Ref {self.ty!r})"


@dataclass(frozen=True)
class FunT:
    dom: "Ty"
    pc: GLabel
    cod: "Ty"

    def __repr__(self):
        return f"({self.dom!r} ->[{self.pc!r}] {self.cod!r})"


RawTy = Union[UnitT, BoolT, RefT, FunT]

UNIT = UnitT()
BOOL = BoolT()


@dataclass(frozen=True)
class Ty:
    raw: RawTy
    label: GLabel

    def __repr__(self):
        return f"{self.raw!r}_{self.label!r}"


def _is_glabel(a) -> bool:
    return isinstance(a, (Label, Star))


def subtype(a, b) -> bool:
    """Static subtyping: * relates only to itself; Ref is invariant;
    Fun is contravariant in domain and pc, covariant in codomain."""
    if _is_glabel(a):
        if is_star(a) or is_star(b):
            return is_star(a) and is_star(b)
        return leq(a, b)
    if isinstance(a, Ty):
        return isinstance(b, Ty) and subtype(a.label, b.label) and subtype(a.raw, b.raw)
    if isinstance(a, (UnitT, BoolT)):
        return a == b
    if isinstance(a, RefT):
        return isinstance(b, RefT) and subtype(a.ty, b.ty) and subtype(b.ty, a.ty)
    if isinstance(a, FunT):
        return (isinstance(b, FunT)
                and subtype(b.pc, a.pc)
                and subtype(b.dom, a.dom)
                and subtype(a.cod, b.cod))
    raise InternalError(f"subtype: unexpected operands {a!r}, {b!r}")


def consistent(a, b) -> bool:
    """Consistency: * is consistent with anything; structural otherwise."""
    if _is_glabel(a):
        return is_star(a) or is_star(b) or a is b
    if isinstance(a, Ty):
        return isinstance(b, Ty) and consistent(a.label, b.label) and consistent(a.raw, b.raw)
    if isinstance(a, (UnitT, BoolT)):
        return a == b
    if isinstance(a, RefT):
        return isinstance(b, RefT) and consistent(a.ty, b.ty)
    if isinstance(a, FunT):
        return (isinstance(b, FunT)
                and consistent(a.pc, b.pc)
                and consistent(a.dom, b.dom)
                and consistent(a.cod, b.cod))
    raise InternalError(f"consistent: unexpected operands {a!r}, {b!r}")


def cons_subtype(a, b) -> bool:
    """Consistent subtyping: like subtyping but * relates to everything."""
    if _is_glabel(a):
        if is_star(a) or is_star(b):
            return True
        return leq(a, b)
    if isinstance(a, Ty):
        return isinstance(b, Ty) and cons_subtype(a.label, b.label) and cons_subtype(a.raw, b.raw)
    if isinstance(a, (UnitT, BoolT)):
        return a == b
    if isinstance(a, RefT):
        return isinstance(b, RefT) and cons_subtype(a.ty, b.ty) and cons_subtype(b.ty, a.ty)
    if isinstance(a, FunT):
        return (isinstance(b, FunT)
                and cons_subtype(b.pc, a.pc)
                and cons_subtype(b.dom, a.dom)
                and cons_subtype(a.cod, b.cod))
    raise InternalError(f"cons_subtype: unexpected operands {a!r}, {b!r}")


def gradual_meet(a, b):
    """Precision meet. Returns None where undefined (e.g. distinct
    concrete labels, mismatched raw constructors)."""
    if _is_glabel(a):
        if is_star(a):
            return b
        if is_star(b):
            return a
        return a if a is b else None
    if isinstance(a, Ty):
        if not isinstance(b, Ty):
            return None
        raw = gradual_meet(a.raw, b.raw)
        lab = gradual_meet(a.label, b.label)
        if raw is None or lab is None:
            return None
        return Ty(raw, lab)
    if isinstance(a, (UnitT, BoolT)):
        return a if a == b else None
    if isinstance(a, RefT):
        if not isinstance(b, RefT):
            return None
        inner = gradual_meet(a.ty, b.ty)
        return None if inner is None else RefT(inner)
    if isinstance(a, FunT):
        if not isinstance(b, FunT):
            return None
        dom = gradual_meet(a.dom, b.dom)
        pc = gradual_meet(a.pc, b.pc)
        cod = gradual_meet(a.cod, b.cod)
        if dom is None or pc is None or cod is None:
            return None
        return FunT(dom, pc, cod)
    raise InternalError(f"gradual_meet: unexpected operands {a!r}, {b!r}")


def cons_join(a, b):
    """Consistent join; * absorbs, function domains/pc use the consistent
    meet, Ref contents use the precision meet. None where undefined."""
    if _is_glabel(a):
        if is_star(a) or is_star(b):
            return STAR
        return join(a, b)
    if isinstance(a, Ty):
        if not isinstance(b, Ty):
            return None
        raw = cons_join(a.raw, b.raw)
        if raw is None:
            return None
        return Ty(raw, cons_join(a.label, b.label))
    if isinstance(a, (UnitT, BoolT)):
        return a if a == b else None
    if isinstance(a, RefT):
        if not isinstance(b, RefT):
            return None
        inner = gradual_meet(a.ty, b.ty)
        return None if inner is None else RefT(inner)
    if isinstance(a, FunT):
        if not isinstance(b, FunT):
            return None
        dom = cons_meet(a.dom, b.dom)
        cod = cons_join(a.cod, b.cod)
        if dom is None or cod is None:
            return None
        return FunT(dom, cons_meet(a.pc, b.pc), cod)
    raise InternalError(f"cons_join: unexpected operands {a!r}, {b!r}")


def cons_meet(a, b):
    """Consistent meet, dual to cons_join."""
    if _is_glabel(a):
        if is_star(a) or is_star(b):
            return STAR
        return meet(a, b)
    if isinstance(a, Ty):
        if not isinstance(b, Ty):
            return None
        raw = cons_meet(a.raw, b.raw)
        if raw is None:
            return None
        return Ty(raw, cons_meet(a.label, b.label))
    if isinstance(a, (UnitT, BoolT)):
        return a if a == b else None
    if isinstance(a, RefT):
        if not isinstance(b, RefT):
            return None
        inner = gradual_meet(a.ty, b.ty)
        return None if inner is None else RefT(inner)
    if isinstance(a, FunT):
        if not isinstance(b, FunT):
            return None
        dom = cons_join(a.dom, b.dom)
        cod = cons_meet(a.cod, b.cod)
        if dom is None or cod is None:
            return None
        return FunT(dom, cons_join(a.pc, b.pc), cod)
    raise InternalError(f"cons_meet: unexpected operands {a!r}, {b!r}")


def merge(a, b):
    """Given a consistent subtype pair a, b, compute c with
    consistent(a, c) and subtype(c, b).

    Contravariant positions (function domains and pc annotations) switch
    to the dual direction, which computes c' with subtype(a, c') and
    consistent(c', b); that keeps both properties through function types.
    """
    if not cons_subtype(a, b):
        raise InternalError(f"merge precondition: {a!r} not a consistent subtype of {b!r}")
    return _merge(a, b)


def _merge(a, b):
    if _is_glabel(a):
        if is_star(b):
            return STAR
        if is_star(a):
            return b
        return a
    if isinstance(a, Ty):
        return Ty(_merge(a.raw, b.raw), _merge(a.label, b.label))
    if isinstance(a, (UnitT, BoolT)):
        return a
    if isinstance(a, RefT):
        return b
    if isinstance(a, FunT):
        return FunT(_merge_dual(b.dom, a.dom), _merge_dual(b.pc, a.pc),
                    _merge(a.cod, b.cod))
    raise InternalError(f"merge: unexpected operands {a!r}, {b!r}")


def _merge_dual(a, b):
    if _is_glabel(a):
        if is_star(a):
            return STAR
        if is_star(b):
            return a
        return b
    if isinstance(a, Ty):
        return Ty(_merge_dual(a.raw, b.raw), _merge_dual(a.label, b.label))
    if isinstance(a, (UnitT, BoolT)):
        return a
    if isinstance(a, RefT):
        return a
    if isinstance(a, FunT):
        return FunT(_merge(b.dom, a.dom), _merge(b.pc, a.pc),
                    _merge_dual(a.cod, b.cod))
    raise InternalError(f"merge (dual): unexpected operands {a!r}, {b!r}")


def merge_dual(a, b):
    """Dual merge: given a consistent subtype pair a, b, compute c with
    subtype(a, c) and consistent(c, b)."""
    if not cons_subtype(a, b):
        raise InternalError(f"merge precondition: {a!r} not a consistent subtype of {b!r}")
    return _merge_dual(a, b)


def stamp_type(a: Ty, g: GLabel) -> Ty:
    """Join g onto the top-level label of a; the raw part is unchanged."""
    return Ty(a.raw, cons_join(a.label, g))
