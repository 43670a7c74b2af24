"""Gradual security-typed language: surface checker, cast calculus,
NSU-monitored semantics, erasure, and metatheory harness."""
