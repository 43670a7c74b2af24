"""Cast calculus: runtime terms, casts and their classification, value
predicates, label stamping on values, substitution, and a type checker
for runtime configurations.

Compared to the surface language, this language adds addresses, casts,
PC casts, protection terms, errors, the opaque value, and the three-way
split of heap writes (static / NSU-checked / already-checked).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .lattice import (
    BOOL, BoolT, FunT, GLabel, InternalError, Label, RefT, Ty, UNIT, UnitT,
    cons_join, consistent, is_star, join, leq, stamp_type, subtype,
)

LOW = Label.LOW
HIGH = Label.HIGH


@dataclass(frozen=True)
class Cast:
    """A cast between two consistent types, carrying a blame label."""
    src: Ty
    tgt: Ty
    blame: str

    def __post_init__(self):
        if not consistent(self.src, self.tgt):
            raise InternalError(f"cast between inconsistent types "
                                f"{self.src!r} and {self.tgt!r}")

    def __repr__(self):
        return f"{self.src!r} => ^{self.blame} {self.tgt!r}"


@dataclass(frozen=True)
class CVar:
    name: str


@dataclass(frozen=True)
class CConst:
    kind: str  # "unit" | "true" | "false"
    label: Label


@dataclass(frozen=True)
class CLam:
    pc: GLabel
    var: str
    ty: Ty
    body: "CCTerm"
    label: Label


@dataclass(frozen=True)
class CApp:
    fun: "CCTerm"
    arg: "CCTerm"


@dataclass(frozen=True)
class CIf:
    cond: "CCTerm"
    ty: Ty  # declared type of both branches
    then: "CCTerm"
    els: "CCTerm"


@dataclass(frozen=True)
class CLet:
    var: str
    rhs: "CCTerm"
    body: "CCTerm"


@dataclass(frozen=True)
class RefStatic:
    label: Label
    init: "CCTerm"


@dataclass(frozen=True)
class RefChecked:
    label: Label
    init: "CCTerm"


@dataclass(frozen=True)
class RefNSU:
    label: Label
    init: "CCTerm"


@dataclass(frozen=True)
class CDeref:
    ref: "CCTerm"


@dataclass(frozen=True)
class AssignStatic:
    target: "CCTerm"
    value: "CCTerm"


@dataclass(frozen=True)
class AssignChecked:
    target: "CCTerm"
    value: "CCTerm"


@dataclass(frozen=True)
class AssignNSU:
    target: "CCTerm"
    value: "CCTerm"


@dataclass(frozen=True)
class Addr:
    """Address n pointing into one half of the heap, itself labeled."""
    index: int
    half: Label
    label: Label


@dataclass(frozen=True)
class CastE:
    term: "CCTerm"
    cast: Cast


@dataclass(frozen=True)
class CastPC:
    glabel: GLabel
    body: "CCTerm"


@dataclass(frozen=True)
class Prot:
    label: Label
    body: "CCTerm"


@dataclass(frozen=True)
class Err:
    kind: str  # "blame" | "nsu-error"
    blame: Optional[str] = None


@dataclass(frozen=True)
class Opaque:
    pass


CCTerm = Union[CVar, CConst, CLam, CApp, CIf, CLet, RefStatic, RefChecked,
               RefNSU, CDeref, AssignStatic, AssignChecked, AssignNSU,
               Addr, CastE, CastPC, Prot, Err, Opaque]

OPAQUE = Opaque()


def cast_is_inert(c: Cast) -> bool:
    """Inert casts are value-forming: a concrete source at every position
    that could otherwise make the cast reducible."""
    src, tgt = c.src, c.tgt
    if isinstance(src.raw, (UnitT, BoolT)):
        return not is_star(src.label) and is_star(tgt.label)
    if isinstance(src.raw, FunT):
        return not is_star(src.label) and not is_star(src.raw.pc)
    if isinstance(src.raw, RefT):
        return not is_star(src.label) and not is_star(src.raw.ty.label)
    raise InternalError(f"cast_is_inert: unexpected cast {c!r}")


def cast_is_active(c: Cast) -> bool:
    """Active casts reduce when applied to a value. Derived directly from
    the classification rules, not as the complement of inertness, so that
    totality and exclusivity can be checked independently."""
    src, tgt = c.src, c.tgt
    if isinstance(src.raw, (UnitT, BoolT)):
        return src.label == tgt.label or (is_star(src.label) and not is_star(tgt.label))
    if isinstance(src.raw, FunT):
        return is_star(src.label) or (not is_star(src.label) and is_star(src.raw.pc))
    if isinstance(src.raw, RefT):
        return is_star(src.label) or (not is_star(src.label) and is_star(src.raw.ty.label))
    raise InternalError(f"cast_is_active: unexpected cast {c!r}")


def is_value(t: CCTerm) -> bool:
    if isinstance(t, (CConst, CLam, Addr, Opaque)):
        return True
    if isinstance(t, CastE):
        return is_value(t.term) and cast_is_inert(t.cast)
    return False


def stamp_value(v: CCTerm, lab: Label) -> CCTerm:
    """V joined with a concrete label: raise the value's own label and,
    through inert cast wrappers, the labels of both cast endpoints."""
    if lab is LOW:
        return v
    if isinstance(v, CConst):
        return CConst(v.kind, join(v.label, lab))
    if isinstance(v, CLam):
        return CLam(v.pc, v.var, v.ty, v.body, join(v.label, lab))
    if isinstance(v, Addr):
        return Addr(v.index, v.half, join(v.label, lab))
    if isinstance(v, Opaque):
        return v
    if isinstance(v, CastE):
        c = Cast(stamp_type(v.cast.src, lab), stamp_type(v.cast.tgt, lab),
                 v.cast.blame)
        return CastE(stamp_value(v.term, lab), c)
    raise InternalError(f"stamp_value: not a value: {v!r}")


def subst(term: CCTerm, name: str, value: CCTerm) -> CCTerm:
    """Capture is impossible because substituted values are closed."""
    def go(t):
        if isinstance(t, CVar):
            return value if t.name == name else t
        if isinstance(t, (CConst, Addr, Err, Opaque)):
            return t
        if isinstance(t, CLam):
            if t.var == name:
                return t
            return CLam(t.pc, t.var, t.ty, go(t.body), t.label)
        if isinstance(t, CApp):
            return CApp(go(t.fun), go(t.arg))
        if isinstance(t, CIf):
            return CIf(go(t.cond), t.ty, go(t.then), go(t.els))
        if isinstance(t, CLet):
            body = t.body if t.var == name else go(t.body)
            return CLet(t.var, go(t.rhs), body)
        if isinstance(t, (RefStatic, RefChecked, RefNSU)):
            return type(t)(t.label, go(t.init))
        if isinstance(t, CDeref):
            return CDeref(go(t.ref))
        if isinstance(t, (AssignStatic, AssignChecked, AssignNSU)):
            return type(t)(go(t.target), go(t.value))
        if isinstance(t, CastE):
            return CastE(go(t.term), t.cast)
        if isinstance(t, CastPC):
            return CastPC(t.glabel, go(t.body))
        if isinstance(t, Prot):
            return Prot(t.label, go(t.body))
        raise InternalError(f"subst: unexpected term {t!r}")
    return go(term)


class CCTypeError(Exception):
    """A runtime term failed to typecheck; signals broken preservation."""


@dataclass(frozen=True)
class AnyTy:
    """Type of the error term, which inhabits every type."""

    def __repr__(self):
        return "Any"


ANY = AnyTy()


def _sub(a, b) -> bool:
    if isinstance(a, AnyTy) or isinstance(b, AnyTy):
        return True
    return subtype(a, b)


def _stamp(a, g):
    return a if isinstance(a, AnyTy) else stamp_type(a, g)


def typecheck_cc(env: dict, sigma, gc: GLabel, pc: Label, term: CCTerm):
    """Synthesize a minimal type for a runtime term, inlining the two
    subsumption rules at the premises that demand a specific shape.

    sigma is a heap typing context (see heap module). Universally
    quantified dynamic-PC premises are checked once at pc = high, which
    is the strongest instance: the dynamic PC only ever appears in
    side conditions of the form pc <= l.
    """
    def fail(rule, msg):
        return CCTypeError(f"{rule}: {msg}")

    def go(env, gc, pc, t):
        if isinstance(t, CVar):
            if t.name not in env:
                raise fail("var", f"unbound variable {t.name}")
            return env[t.name]
        if isinstance(t, CConst):
            return Ty(UNIT if t.kind == "unit" else BOOL, t.label)
        if isinstance(t, CLam):
            body_env = dict(env)
            body_env[t.var] = t.ty
            b = go(body_env, t.pc, HIGH, t.body)
            if isinstance(b, AnyTy):
                raise fail("lam", "cannot synthesize a type for an error-typed body")
            return Ty(FunT(t.ty, t.pc, b), t.label)
        if isinstance(t, CApp):
            f = go(env, gc, pc, t.fun)
            a = go(env, gc, pc, t.arg)
            if isinstance(f, AnyTy):
                return ANY
            if not isinstance(f.raw, FunT):
                raise fail("app", f"non-function type {f!r} in function position")
            g = f.label
            if not _sub(cons_join(gc, g), f.raw.pc):
                raise fail("app", f"pc bound {cons_join(gc, g)!r} is not a subtype "
                                  f"of the function pc {f.raw.pc!r}")
            if not _sub(a, f.raw.dom):
                raise fail("app", f"argument type {a!r} is not a subtype of the "
                                  f"domain {f.raw.dom!r}")
            return _stamp(f.raw.cod, g)
        if isinstance(t, CIf):
            c = go(env, gc, pc, t.cond)
            if isinstance(c, AnyTy):
                g = LOW
            else:
                if not isinstance(c.raw, BoolT):
                    raise fail("if", f"non-boolean condition type {c!r}")
                g = c.label
            branch_gc = cons_join(gc, g)
            for branch in (t.then, t.els):
                b = go(env, branch_gc, HIGH, branch)
                if not _sub(b, t.ty):
                    raise fail("if", f"branch type {b!r} is not a subtype of the "
                                     f"annotation {t.ty!r}")
            return _stamp(t.ty, g)
        if isinstance(t, CLet):
            a = go(env, gc, pc, t.rhs)
            if isinstance(a, AnyTy):
                return ANY
            body_env = dict(env)
            body_env[t.var] = a
            return go(body_env, gc, HIGH, t.body)
        if isinstance(t, (RefStatic, RefChecked, RefNSU)):
            a = go(env, gc, pc, t.init)
            if isinstance(t, RefStatic):
                if is_star(gc):
                    raise fail("ref", "static allocation under unknown pc")
                if not leq(gc, t.label):
                    raise fail("ref", f"static pc {gc!r} above cell label {t.label!r}")
            elif isinstance(t, RefChecked):
                if not leq(pc, t.label):
                    raise fail("ref-checked", f"dynamic pc {pc!r} above cell label "
                                              f"{t.label!r}")
            if isinstance(a, AnyTy):
                return ANY
            cell = Ty(a.raw, t.label)
            if not _sub(a, cell):
                raise fail("ref", f"initializer type {a!r} is not a subtype of the "
                                  f"cell type {cell!r}")
            return Ty(RefT(cell), LOW)
        if isinstance(t, CDeref):
            a = go(env, gc, pc, t.ref)
            if isinstance(a, AnyTy):
                return ANY
            if not isinstance(a.raw, RefT):
                raise fail("deref", f"non-reference type {a!r}")
            return _stamp(a.raw.ty, a.label)
        if isinstance(t, (AssignStatic, AssignChecked, AssignNSU)):
            l = go(env, gc, pc, t.target)
            if isinstance(l, AnyTy):
                go(env, gc, HIGH if isinstance(t, AssignNSU) else pc, t.value)
                return Ty(UNIT, LOW)
            if not isinstance(l.raw, RefT):
                raise fail("assign", f"non-reference type {l!r} in target position")
            cell = l.raw.ty
            if isinstance(t, AssignNSU):
                a = go(env, gc, HIGH, t.value)
                if not _sub(l.label, cell.label):
                    raise fail("assign-nsu", f"reference label {l.label!r} is not a "
                                             f"subtype of the cell label {cell.label!r}")
            else:
                a = go(env, gc, pc, t.value)
                if is_star(cell.label):
                    raise fail("assign", "checked or static write to a cell with "
                                         "unknown label")
                if not _sub(l.label, cell.label):
                    raise fail("assign", f"reference label {l.label!r} is not a "
                                         f"subtype of the cell label {cell.label!r}")
                if isinstance(t, AssignStatic):
                    if is_star(gc) or not leq(gc, cell.label):
                        raise fail("assign", f"static pc {gc!r} above cell label "
                                             f"{cell.label!r}")
                else:
                    if not leq(pc, cell.label):
                        raise fail("assign-checked", f"dynamic pc {pc!r} above cell "
                                                     f"label {cell.label!r}")
            if not _sub(a, cell):
                raise fail("assign", f"assigned type {a!r} is not a subtype of the "
                                     f"cell type {cell!r}")
            return Ty(UNIT, LOW)
        if isinstance(t, Addr):
            raw = sigma.lookup(t.index, t.half)
            if raw is None:
                raise fail("addr", f"address {t.index}@{t.half!r} not in the heap "
                                   f"context")
            return Ty(RefT(Ty(raw, t.half)), t.label)
        if isinstance(t, CastE):
            a = go(env, gc, pc, t.term)
            if not _sub(a, t.cast.src):
                raise fail("cast", f"term type {a!r} is not a subtype of the cast "
                                   f"source {t.cast.src!r}")
            return t.cast.tgt
        if isinstance(t, CastPC):
            if not consistent(pc, t.glabel):
                raise fail("cast-pc", f"dynamic pc {pc!r} inconsistent with {t.glabel!r}")
            return go(env, t.glabel, pc, t.body)
        if isinstance(t, Prot):
            a = go(env, cons_join(gc, t.label), join(pc, t.label), t.body)
            return _stamp(a, t.label)
        if isinstance(t, Err):
            return ANY
        raise fail("typecheck", f"unexpected term {t!r}")

    return go(env, gc, pc, term)
