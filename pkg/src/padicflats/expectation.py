"""Expected number of k-flats on random complete intersections.

The expected count factors as (Grassmannian mass) x E|det J|_p, where J is
the random Jacobian described by a JacobianTemplate.  E|det J|_p is
computed either by exhaustive enumeration of residues mod p^m or by Monte
Carlo; both return brackets, since a determinant that vanishes mod p^m only
tells us |det|_p <= p^-m.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._enum import CHUNK, check_guard, chunk_bounds, default_guard, residue_tuples
from .jacobian import DegreeProfile, JacobianTemplate, build_template, instantiate_batch
from .linalg import VolumeTable, det_valuation_batch, grassmannian_volume
from .padic import BracketedValue, PadicContext
from .sampling import CoefficientAssignment, SeededStream, monomials, sample_residues

__all__ = [
    "McEstimate",
    "FlatCountResult",
    "exact_det_expectation",
    "exact_det_histogram",
    "mc_det_expectation",
    "expected_flats",
    "closed_form",
    "reference_values",
    "smooth_projective_zero_count",
    "smooth_zero_counts",
    "expected_smooth_zero_count",
    "HenselCheck",
    "hensel_cross_check",
    "format_rational",
]

MC_PARTITION = 25_000
DEFAULT_MC_PRECISION = 20


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _bracket_from_histogram(hist, p: int, m: int) -> BracketedValue:
    total = sum(hist)
    lo = sum(Fraction(c, p**v) for v, c in enumerate(hist[:m]))
    hi = lo + Fraction(hist[m], p**m)
    return BracketedValue(lo / total, hi / total)


@dataclass(frozen=True)
class McEstimate:
    mean_bracket: BracketedValue
    std_error: float
    samples: int
    seed: int
    histogram: tuple = ()

    @classmethod
    def from_histogram(cls, hist, p: int, m: int, seed: int) -> McEstimate:
        hist = tuple(int(c) for c in hist)
        n = sum(hist)
        if n < 1:
            raise ValueError("empty histogram")
        bracket = _bracket_from_histogram(hist, p, m)
        # per-sample midpoints: p^-v exactly, or p^-m / 2 when censored
        mids = [Fraction(1, p**v) for v in range(m)] + [Fraction(1, 2 * p**m)]
        mean = sum(c * x for c, x in zip(hist, mids)) / n
        second = sum(c * x * x for c, x in zip(hist, mids)) / n
        var = (second - mean * mean) * n / (n - 1) if n > 1 else Fraction(0)
        return cls(bracket, math.sqrt(float(var) / n), n, seed, hist)

    @property
    def mean(self) -> Fraction:
        return self.mean_bracket.midpoint

    def scaled(self, factor) -> McEstimate:
        factor = Fraction(factor)
        return McEstimate(
            self.mean_bracket.scale(factor), self.std_error * float(factor), self.samples, self.seed, self.histogram
        )

    def within(self, reference, n_se: float = 4.0) -> bool:
        ref = float(Fraction(reference))
        slack = n_se * self.std_error
        return float(self.mean_bracket.lo) - slack <= ref <= float(self.mean_bracket.hi) + slack

    def z_score(self, reference) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean_bracket.contains(reference) else math.inf
        return (float(self.mean) - float(Fraction(reference))) / self.std_error


def _workers(workers):
    return os.cpu_count() or 1 if workers is None else max(1, int(workers))


def _map(fn, items, workers):
    workers = _workers(workers)
    if workers == 1 or len(items) == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def exact_det_histogram(t: JacobianTemplate, ctx: PadicContext, guard=None, workers=None) -> tuple:
    """Counts of v_p(det) over every residue assignment; the last entry counts det = 0 mod p^m."""
    p, m, q = ctx.prime, ctx.precision, ctx.modulus
    total = q**t.var_count
    check_guard(total, guard)

    def part(bounds):
        lo, hi = bounds
        mats = instantiate_batch(t, residue_tuples(q, t.var_count, lo, hi))
        return np.bincount(det_valuation_batch(mats, p, m), minlength=m + 1)

    hist = np.zeros(m + 1, dtype=np.int64)
    for h in _map(part, chunk_bounds(total, CHUNK), workers):
        hist += h
    return tuple(int(x) for x in hist)


def exact_det_expectation(t: JacobianTemplate, ctx: PadicContext, guard=None, workers=None) -> BracketedValue:
    """Rigorous bracket for E|det J|_p from all p^(m * var_count) residue assignments."""
    hist = exact_det_histogram(t, ctx, guard, workers)
    return _bracket_from_histogram(hist, ctx.prime, ctx.precision)


def mc_det_expectation(
    t: JacobianTemplate, ctx: PadicContext, stream: SeededStream, samples: int, workers=None
) -> McEstimate:
    """Monte Carlo bracket for E|det J|_p.

    Samples are cut into fixed partitions of MC_PARTITION draws, partition i
    reading stream.child(i).  Partition histograms are integer counts, so the
    result does not depend on the number of workers.
    """
    if samples < 100:
        raise ValueError("Monte Carlo needs at least 100 samples")
    p, m = ctx.prime, ctx.precision

    def part(args):
        i, (lo, hi) = args
        draws = sample_residues(ctx, stream.child(i), (hi - lo, t.var_count))
        return np.bincount(det_valuation_batch(instantiate_batch(t, draws), p, m), minlength=m + 1)

    hist = np.zeros(m + 1, dtype=np.int64)
    for h in _map(part, list(enumerate(chunk_bounds(samples, MC_PARTITION))), workers):
        hist += h
    return McEstimate.from_histogram(hist, p, m, stream.seed)


# ---------------------------------------------------------------------------
# closed forms


def closed_form(case: str, p: int, n: int | None = None, k: int | None = None) -> Fraction:
    """Exact reference values.

    points       expected number of points on n random hypersurfaces (always 1)
    detmatrix    E|det M_n|_p for an n x n matrix of uniform entries
    cubic        expected number of lines on a random cubic surface
    cubic_det    E|det J|_p for the cubic-surface Jacobian
    quadrics     expected number of lines on two random quadrics in P^4 (always 1)
    quadrics_det E|det J|_p for the two-quadrics Jacobian
    limsup_bound 1 / lambda(GL_2(Z_p)), the large-n bound for lines on degree 2n-3 hypersurfaces
    lower_bound  lower bound (1 - (k+1)/p)^(n-k) for E|det J|_p
    """
    p = Fraction(p)
    if case == "points":
        return Fraction(1)
    if case == "detmatrix":
        _need(n, "n")
        return (p - 1) * p**n / (p ** (n + 1) - 1)
    if case == "cubic":
        return (p**3 - 1) * (p**2 + 1) / (p**5 - 1)
    if case == "cubic_det":
        return p**4 / (p**4 + p**3 + p**2 + p + 1)
    if case == "quadrics":
        return Fraction(1)
    if case == "quadrics_det":
        return (p**6 - 1) / p**3 * (p / (p**4 - 1) - (p + 1) / (p**5 - 1) + 1 / (p**6 - 1))
    if case == "limsup_bound":
        return 1 / ((1 - 1 / p) * (1 - 1 / p**2))
    if case == "lower_bound":
        _need(n, "n")
        _need(k, "k")
        # below p = k+1 the per-step probability bound is vacuous
        base = max(Fraction(0), 1 - (k + 1) / p)
        return base ** (n - k)
    raise ValueError(f"unknown closed-form case {case!r}")


def _need(x, name):
    if x is None:
        raise ValueError(f"closed form needs {name}")


def reference_values(profile: DegreeProfile, p: int):
    """(case, expected count, E|det J|) for profiles with a known closed form, else None."""
    n, k, degs = profile.n, profile.k, profile.degrees
    if k == 0 and len(degs) == n:
        return "points", closed_form("points", p), closed_form("detmatrix", p, n=n)
    if (n, k, tuple(sorted(degs))) == (3, 1, (3,)):
        return "cubic", closed_form("cubic", p), closed_form("cubic_det", p)
    if (n, k, tuple(sorted(degs))) == (4, 1, (2, 2)):
        return "quadrics", closed_form("quadrics", p), closed_form("quadrics_det", p)
    return None


# ---------------------------------------------------------------------------
# assembled counts


@dataclass(frozen=True)
class FlatCountResult:
    profile: DegreeProfile
    p: int
    m: int
    method: str
    grassmannian_factor: Fraction
    det_expectation: object  # BracketedValue (exact) or McEstimate (mc)
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def expected_count(self):
        if isinstance(self.det_expectation, McEstimate):
            return self.det_expectation.scaled(self.grassmannian_factor)
        return self.det_expectation.scale(self.grassmannian_factor)

    @property
    def count_bracket(self) -> BracketedValue:
        ec = self.expected_count
        return ec.mean_bracket if isinstance(ec, McEstimate) else ec

    @property
    def std_error(self) -> float:
        ec = self.expected_count
        return ec.std_error if isinstance(ec, McEstimate) else 0.0

    def agrees_with(self, reference, n_se: float = 4.0) -> bool:
        ec = self.expected_count
        if isinstance(ec, McEstimate):
            return ec.within(reference, n_se)
        return ec.contains(reference)

    def to_record(self) -> dict:
        ref = reference_values(self.profile, self.p)
        bracket = self.count_bracket
        det = self.det_expectation
        det_bracket = det.mean_bracket if isinstance(det, McEstimate) else det
        rec = {
            "profile": self.profile.to_dict(),
            "p": self.p,
            "m": self.m,
            "method": self.method,
            "grassmannian_factor": format_rational(self.grassmannian_factor),
            "det_lo": format_rational(det_bracket.lo),
            "det_hi": format_rational(det_bracket.hi),
            "lo": format_rational(bracket.lo),
            "hi": format_rational(bracket.hi),
            "lo_decimal": float(f"{float(bracket.lo):.12g}"),
            "hi_decimal": float(f"{float(bracket.hi):.12g}"),
            "std_error": self.std_error if self.method == "mc" else None,
            "samples": det.samples if isinstance(det, McEstimate) else None,
            "seed": self.seed,
            "reference_case": None,
            "reference_value": None,
            "pass": None,
        }
        if ref is not None:
            case, count_ref, _ = ref
            rec["reference_case"] = case
            rec["reference_value"] = format_rational(count_ref)
            rec["pass"] = bool(self.agrees_with(count_ref))
        return rec


def default_exact_precision(t: JacobianTemplate, p: int, guard=None) -> int:
    """Largest m with p^(m * var_count) inside the guard (at least 1)."""
    guard = default_guard() if guard is None else guard
    m = 1
    while p ** ((m + 1) * t.var_count) <= guard:
        m += 1
    return m


def expected_flats(
    profile: DegreeProfile,
    method: str = "exact",
    *,
    p: int,
    precision: int | None = None,
    samples: int = 200_000,
    seed: int = 0,
    guard: int | None = None,
    workers: int | None = None,
) -> FlatCountResult:
    t = build_template(profile)
    if precision is None:
        precision = default_exact_precision(t, p, guard) if method == "exact" else DEFAULT_MC_PRECISION
    ctx = PadicContext(p, precision)
    factor = grassmannian_volume(profile.k, profile.n, VolumeTable(p))
    if method == "exact":
        det = exact_det_expectation(t, ctx, guard, workers)
        return FlatCountResult(profile, p, precision, method, factor, det)
    if method == "mc":
        det = mc_det_expectation(t, ctx, SeededStream(seed), samples, workers)
        return FlatCountResult(profile, p, precision, method, factor, det, seed=seed)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# smooth zeros over the residue field


def projective_points_mod_p(p: int, n: int) -> list[tuple]:
    """Points of P^n(F_p), first nonzero coordinate equal to 1."""
    pts = []
    for lead in range(n + 1):
        for tail in np.ndindex(*([p] * (n - lead))):
            pts.append((0,) * lead + (1,) + tuple(int(x) for x in tail))
    return pts


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(a[0]) if a else 0
    while rank < len(a) and col < ncols:
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][col]:
                c = a[i][col]
                a[i] = [(x - c * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        col += 1
    return rank


def _gradient(f: CoefficientAssignment, x, p: int) -> list[int]:
    grad = [0] * (f.n + 1)
    for alpha, c in f.values.items():
        for i, a in enumerate(alpha):
            if a:
                term = a * c.residue
                for t, (xt, e) in enumerate(zip(x, alpha)):
                    term *= pow(xt, e - (t == i), p)
                grad[i] += term
    return [g % p for g in grad]


def smooth_projective_zero_count(system, n: int) -> int:
    """Common zeros in P^n(F_p) at which the Jacobian of the system has rank n.

    Coefficients are read modulo p.  By Hensel's lemma each such zero lifts
    to exactly one p-adic zero.
    """
    system = list(system)
    if len(system) != n:
        raise ValueError(f"need exactly n = {n} polynomials, got {len(system)}")
    p = system[0].ctx.prime
    count = 0
    for x in projective_points_mod_p(p, n):
        if all(f.evaluate(x) % p == 0 for f in system):
            if _rank_mod_p([_gradient(f, x, p) for f in system], p) == n:
                count += 1
    return count


def _eval_tables(d: int, n: int, pts: np.ndarray, p: int):
    monos = np.array(monomials(d, n + 1), dtype=np.int64)
    vals = np.ones((pts.shape[0], monos.shape[0]), dtype=np.int64)
    for i in range(n + 1):
        vals = vals * (pts[:, i : i + 1] ** monos[None, :, i]) % p
    grads = []
    for i in range(n + 1):
        g = np.where(monos[:, i] > 0, monos[:, i], 0)[None, :] * np.ones((pts.shape[0], 1), dtype=np.int64)
        for t in range(n + 1):
            e = monos[:, t] - (t == i)
            g = g * (pts[:, t : t + 1] ** np.maximum(e, 0)[None, :]) % p
        grads.append(g % p)
    return vals, grads


def smooth_zero_counts(degrees, n: int, p: int, coeffs: list) -> np.ndarray:
    """Vectorized smooth_projective_zero_count.

    coeffs[j] is a (B, C(d_j + n, n)) array of residues for polynomial j in
    the order of sampling.monomials.  Returns B counts.
    """
    if len(degrees) != n:
        raise ValueError("need exactly n polynomials")
    pts = np.array(projective_points_mod_p(p, n), dtype=np.int64)
    B = coeffs[0].shape[0]
    zero = np.ones((B, pts.shape[0]), dtype=bool)
    jac = np.zeros((B, pts.shape[0], n, n + 1), dtype=np.int64)
    for j, d in enumerate(degrees):
        c = np.asarray(coeffs[j], dtype=np.int64) % p
        vals, grads = _eval_tables(d, n, pts, p)
        zero &= (c @ vals.T) % p == 0
        for i in range(n + 1):
            jac[:, :, j, i] = (c @ grads[i].T) % p
    b_idx, pt_idx = np.nonzero(zero)
    counts = np.zeros(B, dtype=np.int64)
    if b_idx.size == 0:
        return counts
    sub = jac[b_idx, pt_idx]
    smooth = np.zeros(b_idx.size, dtype=bool)
    for drop in range(n + 1):
        keep = [c for c in range(n + 1) if c != drop]
        smooth |= det_valuation_batch(sub[:, :, keep], p, 1) == 0
    np.add.at(counts, b_idx[smooth], 1)
    return counts


def expected_smooth_zero_count(p: int, n: int) -> Fraction:
    """Exact mean of smooth_projective_zero_count for n uniform polynomials.

    Each point is a common zero with probability p^-n, and given that, the
    Jacobian restricted to the chart directions is a uniform n x n matrix
    over F_p.
    """
    points = Fraction(p ** (n + 1) - 1, p - 1)
    return points / Fraction(p) ** n * VolumeTable(p)[n]


@dataclass(frozen=True)
class HenselCheck:
    p: int
    degrees: tuple
    samples: int
    seed: int
    mean: Fraction
    std_error: float

    def within(self, target, tol) -> bool:
        return abs(float(self.mean) - float(Fraction(target))) <= tol


def hensel_cross_check(p: int, degrees, samples: int = 20_000, seed: int = 0, batch: int = 2_000) -> HenselCheck:
    """Mean number of smooth F_p zeros of len(degrees) uniform forms in P^n, n = len(degrees).

    Smooth zeros lift uniquely to Z_p, so this undercounts the p-adic zero
    count only through singular reductions.
    """
    degrees = tuple(int(d) for d in degrees)
    n = len(degrees)
    ctx = PadicContext(p, 1)
    stream = SeededStream(seed)
    counts = []
    for b, (lo, hi) in enumerate(chunk_bounds(samples, batch)):
        sub = stream.child(b)
        coeffs = [sample_residues(ctx, sub.child(j), (hi - lo, len(monomials(d, n + 1)))) for j, d in enumerate(degrees)]
        counts.append(smooth_zero_counts(degrees, n, p, coeffs))
    c = np.concatenate(counts)
    mean = Fraction(int(c.sum()), samples)
    se = float(c.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return HenselCheck(p, degrees, samples, seed, mean, se)
