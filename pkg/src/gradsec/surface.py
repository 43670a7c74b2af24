"""Surface language AST and the syntax-directed surface type checker.

Constants, lambdas, and reference creations carry concrete labels only;
cast-introducing forms (app, if, ref, assign, ann) carry a blame label.
The checker annotates every node with its derived type and the static PC
it was checked under, which is exactly what cast insertion needs later.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .lattice import (
    BOOL, BoolT, FunT, GLabel, Label, RefT, Ty, UNIT, UnitT,
    cons_join, cons_subtype,
    stamp_type,
)


class SurfaceTypeError(Exception):
    """Raised when a surface program violates a typing rule premise."""


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SConst:
    kind: str  # "unit" | "true" | "false"
    label: Label


@dataclass(frozen=True)
class SLam:
    pc: Label
    var: str
    ty: Ty
    body: "SurfaceTerm"
    label: Label


@dataclass(frozen=True)
class SApp:
    fun: "SurfaceTerm"
    arg: "SurfaceTerm"
    blame: str


@dataclass(frozen=True)
class SIf:
    cond: "SurfaceTerm"
    then: "SurfaceTerm"
    els: "SurfaceTerm"
    blame: str


@dataclass(frozen=True)
class SLet:
    var: str
    rhs: "SurfaceTerm"
    body: "SurfaceTerm"


@dataclass(frozen=True)
class SRef:
    label: Label
    init: "SurfaceTerm"
    blame: str


@dataclass(frozen=True)
class SDeref:
    ref: "SurfaceTerm"


@dataclass(frozen=True)
class SAssign:
    target: "SurfaceTerm"
    value: "SurfaceTerm"
    blame: str


@dataclass(frozen=True)
class SAnn:
    term: "SurfaceTerm"
    ty: Ty
    blame: str


SurfaceTerm = Union[SVar, SConst, SLam, SApp, SIf, SLet, SRef, SDeref, SAssign, SAnn]


@dataclass(frozen=True)
class TypedTerm:
    """A surface term paired with its derived type, the static PC it was
    checked under, and the annotated sub-terms in field order."""
    term: SurfaceTerm
    ty: Ty
    gc: GLabel
    children: tuple


def _fail(rule: str, msg: str) -> SurfaceTypeError:
    return SurfaceTypeError(f"{rule}: {msg}")


def typecheck_surface(env: dict, gc: GLabel, term: SurfaceTerm) -> TypedTerm:
    """Check term under variable environment env and static PC gc.

    Premises are checked in rule order; the first failure wins and names
    the rule and premise in the error message.
    """
    if isinstance(term, SVar):
        if term.name not in env:
            raise _fail("var", f"unbound variable {term.name}")
        return TypedTerm(term, env[term.name], gc, ())

    if isinstance(term, SConst):
        raw = UNIT if term.kind == "unit" else BOOL
        return TypedTerm(term, Ty(raw, term.label), gc, ())

    if isinstance(term, SLam):
        body_env = dict(env)
        body_env[term.var] = term.ty
        body = typecheck_surface(body_env, term.pc, term.body)
        ty = Ty(FunT(term.ty, term.pc, body.ty), term.label)
        return TypedTerm(term, ty, gc, (body,))

    if isinstance(term, SApp):
        fun = typecheck_surface(env, gc, term.fun)
        if not isinstance(fun.ty.raw, FunT):
            raise _fail("app", f"function position has non-function type {fun.ty!r}")
        arg = typecheck_surface(env, gc, term.arg)
        dom, gcp, cod = fun.ty.raw.dom, fun.ty.raw.pc, fun.ty.raw.cod
        g = fun.ty.label
        if not cons_subtype(arg.ty, dom):
            raise _fail("app", f"argument type {arg.ty!r} is not a consistent subtype "
                               f"of the parameter type {dom!r}")
        if not cons_subtype(g, gcp):
            raise _fail("app", f"function label {g!r} is not a consistent subtype of "
                               f"its pc annotation {gcp!r}")
        if not cons_subtype(gc, gcp):
            raise _fail("app", f"static pc {gc!r} is not a consistent subtype of the "
                               f"function's pc annotation {gcp!r}")
        return TypedTerm(term, stamp_type(cod, g), gc, (fun, arg))

    if isinstance(term, SIf):
        cond = typecheck_surface(env, gc, term.cond)
        if not isinstance(cond.ty.raw, BoolT):
            raise _fail("if", f"condition has non-boolean type {cond.ty!r}")
        g = cond.ty.label
        branch_gc = cons_join(gc, g)
        then = typecheck_surface(env, branch_gc, term.then)
        els = typecheck_surface(env, branch_gc, term.els)
        joined = cons_join(then.ty, els.ty)
        if joined is None:
            raise _fail("if", f"consistent join undefined for branch types "
                              f"{then.ty!r} and {els.ty!r}")
        return TypedTerm(term, stamp_type(joined, g), gc, (cond, then, els))

    if isinstance(term, SLet):
        rhs = typecheck_surface(env, gc, term.rhs)
        body_env = dict(env)
        body_env[term.var] = rhs.ty
        body = typecheck_surface(body_env, gc, term.body)
        return TypedTerm(term, body.ty, gc, (rhs, body))

    if isinstance(term, SRef):
        init = typecheck_surface(env, gc, term.init)
        cell = Ty(init.ty.raw, term.label)
        if not cons_subtype(init.ty, cell):
            raise _fail("ref", f"initial value type {init.ty!r} is not a consistent "
                               f"subtype of the cell type {cell!r}")
        if not cons_subtype(gc, term.label):
            raise _fail("ref", f"static pc {gc!r} is not a consistent subtype of the "
                               f"cell label {term.label!r}")
        return TypedTerm(term, Ty(RefT(cell), Label.LOW), gc, (init,))

    if isinstance(term, SDeref):
        ref = typecheck_surface(env, gc, term.ref)
        if not isinstance(ref.ty.raw, RefT):
            raise _fail("deref", f"dereference of non-reference type {ref.ty!r}")
        return TypedTerm(term, stamp_type(ref.ty.raw.ty, ref.ty.label), gc, (ref,))

    if isinstance(term, SAssign):
        target = typecheck_surface(env, gc, term.target)
        if not isinstance(target.ty.raw, RefT):
            raise _fail("assign", f"assignment to non-reference type {target.ty!r}")
        value = typecheck_surface(env, gc, term.value)
        cell = target.ty.raw.ty
        g = target.ty.label
        if not cons_subtype(value.ty, cell):
            raise _fail("assign", f"assigned value type {value.ty!r} is not a "
                                  f"consistent subtype of the cell type {cell!r}")
        if not cons_subtype(g, cell.label):
            raise _fail("assign", f"reference label {g!r} is not a consistent subtype "
                                  f"of the cell label {cell.label!r}")
        if not cons_subtype(gc, cell.label):
            raise _fail("assign", f"static pc {gc!r} is not a consistent subtype of "
                                  f"the cell label {cell.label!r}")
        return TypedTerm(term, Ty(UNIT, Label.LOW), gc, (target, value))

    if isinstance(term, SAnn):
        inner = typecheck_surface(env, gc, term.term)
        if not cons_subtype(inner.ty, term.ty):
            raise _fail("ann", f"term type {inner.ty!r} is not a consistent subtype "
                               f"of the annotation {term.ty!r}")
        return TypedTerm(term, term.ty, gc, (inner,))

    raise _fail("typecheck", f"unknown term {term!r}")
