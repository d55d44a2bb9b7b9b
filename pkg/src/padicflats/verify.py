"""Verification suites: brute-force counts against their closed forms.

Each check yields a record {lemma, params, brute, formula, pass}.  Checks
whose enumeration would exceed the guard are left out of the run.
"""

from __future__ import annotations

from fractions import Fraction

from . import counting as C
from ._enum import default_guard
from .expectation import closed_form, format_rational
from .jacobian import DegreeProfile, admissible_profiles, build_template, det_polynomial, instantiate_batch
from .linalg import PadicMatrix, VolumeTable, det_residue, grassmannian_volume
from .padic import PadicContext, rational_valuation
from .sampling import SeededStream, sample_residues
from .volkenborn import (
    convergence_valuations,
    cubic_det_closed_form,
    cubic_det_integrand,
    volkenborn_partial,
)

SUITES = ("volumes", "counts", "fibers", "jacobian", "volkenborn")

# above this many enumerated points a check is skipped by the suites, even
# when the global guard would allow it
SUITE_BUDGET = 2 * 10**6


def _record(lemma, params, brute, formula, ok=None):
    return {
        "lemma": lemma,
        "params": params,
        "brute": brute,
        "formula": formula,
        "pass": bool(brute == formula) if ok is None else bool(ok),
    }


def _fits(size, guard):
    return size <= min(guard, SUITE_BUDGET)


def suite_volumes(p: int, guard: int):
    for n in (1, 2):
        for m in (1, 2, 3):
            if not _fits(p ** (m * n * n), guard):
                continue
            yield _record("gl_count", {"n": n, "p": p, "m": m}, C.count_gl(n, p, m), C.formula_gl(n, p, m))
            for ell in range(m):
                yield _record(
                    "det_level_count",
                    {"n": n, "p": p, "m": m, "ell": ell},
                    C.count_det_level(n, p, m, ell),
                    C.formula_det_level(n, p, m, ell),
                )
            zero = C.count_det_zero(n, p, m)
            levels = sum(C.formula_det_level(n, p, m, ell) for ell in range(m))
            yield _record("det_mass", {"n": n, "p": p, "m": m}, zero + levels, p ** (m * n * n))


def suite_counts(p: int, guard: int):
    for k in (1, 2, 3):
        if _fits(p ** (3 * k), guard):
            yield _record("A", {"k": k, "p": p}, C.count_A(k, p), C.formula_A(k, p))
    for k in (1, 2):
        if _fits(p ** (4 * k), guard):
            yield _record("B", {"k": k, "p": p}, C.count_B(k, p), C.formula_B(k, p))
    for n in (1, 2):
        if _fits(p ** (4 * n), guard):
            yield _record("singular_2x2", {"p": p, "n": n}, C.count_singular_2x2(p, n), C.formula_singular_2x2(p, n))


def _fiber_record(lemma, report):
    brute = {str(m1): sorted(sizes) for m1, sizes in sorted(report.sizes_by_m1().items())}
    formula = {str(m1): [report.formula(m1)] for m1 in sorted(report.sizes_by_m1())}
    params = {
        "p": report.p,
        "n": report.n,
        "domain": report.domain_size,
        "targets": len(report.fiber_sizes),
        "surjective": report.is_surjective(),
    }
    return _record(lemma, params, brute, formula, report.ok())


def suite_fibers(p: int, guard: int):
    for n in (1, 2):
        if _fits(p ** (6 * n), guard):
            yield _fiber_record("minor_fibers_3x2", C.minor_fibers_3x2(p, n))
    if _fits(p**12, guard):
        yield _fiber_record("minor_fibers_4x3", C.minor_fibers_4x3(p, 1))


def suite_jacobian(p: int, guard: int, trials: int = 200, seed: int = 0):
    for prof in admissible_profiles(6, 2):
        t = build_template(prof)
        yield _record("template_shape", prof.to_dict(), t.check_shape(), True)
    ctx = PadicContext(p, 4)
    for prof in (DegreeProfile(3, 1, (3,)), DegreeProfile(4, 1, (2, 2))):
        t = build_template(prof)
        draws = sample_residues(ctx, SeededStream(seed, 0, (prof.n,)), (trials, t.var_count))
        poly = det_polynomial(prof)(draws.astype(object)) % ctx.modulus
        mats = instantiate_batch(t, draws)
        dets = [det_residue(PadicMatrix(ctx, t.size, t.size, tuple(int(v) for v in m.ravel()))).residue for m in mats]
        agree = sum(int(a) == int(b) for a, b in zip(poly, dets))
        yield _record("det_identity", {**prof.to_dict(), "p": p, "m": ctx.precision, "trials": trials}, agree, trials)


def suite_volkenborn(p: int, guard: int):
    f = cubic_det_integrand()
    target = Fraction(-1, 9)
    partials = []
    for n in (1, 2, 3):
        if not _fits(p ** (6 * n), guard):
            break
        part = volkenborn_partial(f, p, n, guard)
        partials.append(part)
        yield _record(
            "volkenborn_closed_form",
            {"p": p, "n": n},
            format_rational(part.raw_sum),
            format_rational(cubic_det_closed_form(p, n)),
        )
    if not partials:
        return
    # the partial minus -1/9 is p^n times a p-integral polynomial value over 36
    slack = rational_valuation(Fraction(36), p)
    vals = convergence_valuations(partials, target, p)
    for part, v in zip(partials, vals):
        yield _record(
            "volkenborn_limit",
            {"p": p, "n": part.level, "target": "-1/9", "partial": format_rational(part.normalized_sum)},
            v,
            f">= {part.level - slack}",
            v is None or v >= part.level - slack,
        )


def run_suite(name: str, primes=(2, 3, 5), guard: int | None = None):
    guard = default_guard() if guard is None else guard
    names = SUITES if name == "all" else (name,)
    for suite in names:
        fn = {
            "volumes": suite_volumes,
            "counts": suite_counts,
            "fibers": suite_fibers,
            "jacobian": suite_jacobian,
            "volkenborn": suite_volkenborn,
        }.get(suite)
        if fn is None:
            raise ValueError(f"unknown suite {suite!r}")
        for p in primes:
            yield from fn(p, guard)


def bounds_row(p: int) -> dict:
    """One line of the prime scan: cubic and quadric values with their bounds."""
    cubic = closed_form("cubic", p)
    lower = grassmannian_volume(1, 3, VolumeTable(p)) * closed_form("lower_bound", p, n=3, k=1)
    return {
        "p": p,
        "cubic": cubic,
        "quadrics": closed_form("quadrics", p),
        "cubic_lower": lower,
        "limsup_bound": closed_form("limsup_bound", p),
    }
