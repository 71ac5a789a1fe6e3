"""Instance generators.

Three classic severely ill-posed first-kind Fredholm discretizations
(phillips, baart, foxgood) reimplemented from their integral-equation
definitions; a seeded rank-deficient least-squares family with fully known
reference truth; a weak-sharp l1 lower-level construction; and the smooth
nonconvex configuration (Moreau-smoothed log-sum penalty over a
ball-constrained least-squares solution set). Plus the instance text format.

Every generator is a pure function of (name, n, seed, params): rebuilding an
instance is bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bilevel import (BilevelProblem, CompositeObjective, ReferenceTruth,
                      SubgradientAtOpt, WeakSharp, min_norm_l1_subgradient)
from .errors import ConfigurationError, ParseError
from .functions import LeastSquares, MoreauLogSum, ScaledSqNorm, ZeroFunction
from .linalg import format_matrix, format_vector, min_norm_ls, parse_matrix_lines
from .metrics import approximate_projector
from .prox import BallProx, L1Prox, ZeroProx


@dataclass
class InstanceSpec:
    name: str
    n: int
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Fredholm test matrices
# ---------------------------------------------------------------------------

_GL_ORDER = 24  # fixed-order Gauss-Legendre panels; integrands are analytic
                # per cell, so this is accurate to ~1e-15


def _gl_nodes(a: np.ndarray, b: np.ndarray):
    """Gauss-Legendre nodes/weights mapped onto the intervals [a_i, b_i]."""
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    return mid + half * x[None, :], half * w[None, :]


def gen_phillips(n: int):
    """Galerkin box-function discretization on [-6, 6] of the convolution
    kernel K(s,t) = phi(s-t), phi(u) = 1 + cos(pi*u/3) on |u| < 3 (zero
    outside), with right-hand side
    g(s) = (6-|s|)(1 + cos(pi*s/3)/2) + 9 sin(pi*|s|/3)/(2 pi).
    The matrix entries are exact (second differences of an antiderivative),
    so A is exactly symmetric Toeplitz. n must be a multiple of 4.
    """
    if n < 4 or n % 4 != 0:
        raise ConfigurationError(f"phillips requires n >= 4 divisible by 4, got {n}")
    h = 12.0 / n
    c = math.pi / 3.0

    def big_g(u: np.ndarray) -> np.ndarray:
        # second antiderivative of phi, linear (slope +-3) outside [-3, 3]
        inside = np.abs(u) <= 3.0
        out = np.where(
            inside,
            0.5 * u * u - (9.0 / math.pi**2) * np.cos(c * u),
            4.5 + 9.0 / math.pi**2 + 3.0 * (np.abs(u) - 3.0),
        )
        return out

    offsets = h * np.arange(n)
    row = (big_g(offsets + h) - 2.0 * big_g(offsets) + big_g(offsets - h)) / h
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    a = row[idx]

    # right-hand side: exact cell integrals of g on [0, 6], mirrored
    def antideriv(t: np.ndarray) -> np.ndarray:
        # d/dt = g(t) for t >= 0
        return (t * (6.0 - 0.5 * t)
                + ((3.0 - 0.5 * t) * np.sin(c * t) - (2.0 / c) * (np.cos(c * t) - 1.0)) / c)

    edges = np.linspace(0.0, 6.0, n // 2 + 1)
    pos = (antideriv(edges[1:]) - antideriv(edges[:-1])) / math.sqrt(h)
    b = np.concatenate([pos[::-1], pos])
    return a, b


def phillips_solution(n: int) -> np.ndarray:
    """Galerkin coefficients of the exact solution f(t) = phi(t)."""
    h = 12.0 / n
    c = math.pi / 3.0
    edges = np.linspace(-6.0, 6.0, n + 1)

    def anti(t: np.ndarray) -> np.ndarray:
        clipped = np.clip(t, -3.0, 3.0)
        return clipped + np.sin(c * clipped) / c

    return (anti(edges[1:]) - anti(edges[:-1])) / math.sqrt(h)


def gen_baart(n: int):
    """Galerkin box-function discretization of
    int_0^pi exp(s cos t) f(t) dt = 2 sinh(s)/s on s in [0, pi/2],
    solution f(t) = sin t. The s-integration is exact; the t-integration
    uses fixed-order Gauss-Legendre panels. n must be even, n >= 4.
    """
    if n < 4 or n % 2 != 0:
        raise ConfigurationError(f"baart requires even n >= 4, got {n}")
    hs = 0.5 * math.pi / n
    ht = math.pi / n
    s_left = hs * np.arange(n)
    t_edges = ht * np.arange(n + 1)
    tq, tw = _gl_nodes(t_edges[:-1], t_edges[1:])       # (n, Q)
    u = np.cos(tq)                                      # kernel exponent factor

    # int_{s0}^{s0+hs} e^{s u} ds = hs * e^{s0 u} * E(hs u), E(w) = expm1(w)/w
    w = hs * u
    e = np.where(np.abs(w) < 1e-12, 1.0 + 0.5 * w, np.expm1(w) / np.where(w == 0.0, 1.0, w))
    inner = (tw * e)[None, :, :] * np.exp(s_left[:, None, None] * u[None, :, :])
    a = hs * inner.sum(axis=2) / math.sqrt(hs * ht)

    # rhs: cell averages of 2 sinh(s)/s (analytic; GL panels)
    s_edges = hs * np.arange(n + 1)
    sq, sw = _gl_nodes(s_edges[:-1], s_edges[1:])
    vals = 2.0 * np.sinh(sq) / sq
    b = (sw * vals).sum(axis=1) / math.sqrt(hs)
    return a, b


def baart_solution(n: int) -> np.ndarray:
    ht = math.pi / n
    t_edges = ht * np.arange(n + 1)
    return (np.cos(t_edges[:-1]) - np.cos(t_edges[1:])) / math.sqrt(ht)


def gen_foxgood(n: int):
    """Midpoint-rule discretization of
    int_0^1 sqrt(s^2 + t^2) f(t) dt = ((1 + s^2)^{3/2} - s^3)/3 on [0, 1],
    solution f(t) = t.
    """
    if n < 4:
        raise ConfigurationError(f"foxgood requires n >= 4, got {n}")
    h = 1.0 / n
    t = h * (np.arange(1, n + 1) - 0.5)
    a = h * np.sqrt(t[:, None] ** 2 + t[None, :] ** 2)
    b = ((1.0 + t**2) ** 1.5 - t**3) / 3.0
    return a, b


def foxgood_solution(n: int) -> np.ndarray:
    h = 1.0 / n
    return h * (np.arange(1, n + 1) - 0.5)


_MATRIX_GENERATORS = {
    "phillips": gen_phillips,
    "baart": gen_baart,
    "foxgood": gen_foxgood,
}


def inverse_problem(which: str, n: int):
    try:
        gen = _MATRIX_GENERATORS[which]
    except KeyError:
        raise ConfigurationError(
            f"unknown inverse problem {which!r}; pick one of {sorted(_MATRIX_GENERATORS)}"
        )
    return gen(n)


# ---------------------------------------------------------------------------
# Bilevel instances
# ---------------------------------------------------------------------------


def gen_rank_deficient_ls(n: int, rank: int, seed: int, mu_f: float = 1.0,
                          lam: float = 0.1, noise_std: float = 0.0,
                          f_star_budget: int = 0,
                          f_star_eta: float = 1e-9) -> BilevelProblem:
    """Seeded A = U diag(1, 1/2, ..., 1/rank, 0, ...) V^T with b in range(A)
    (unless noise_std > 0). Lower level 0.5*||Ax-b||^2 has the affine
    solution set {A x = proj_range(b)} with exact projector and quadratic
    growth alpha = sigma_rank^2 / 2. Upper level (mu_f/2)||x||^2 + lam*||x||_1.

    With lam = 0 the bilevel solution is the min-norm least-squares point and
    f_star is analytic. With lam > 0 and f_star_budget > 0, f_star is
    manufactured by a long accelerated run at the tiny recorded weight
    f_star_eta, and its tolerance is derived from that weight.
    """
    if not (1 <= rank < n):
        raise ConfigurationError(f"rank must satisfy 1 <= rank < n, got {rank}")
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sigma = 1.0 / np.arange(1.0, rank + 1.0)
    a = (u[:, :rank] * sigma) @ v[:, :rank].T
    b = a @ rng.standard_normal(n)
    if noise_std > 0:
        b = b + noise_std * rng.standard_normal(n)

    lower = CompositeObjective(LeastSquares(a, b), ZeroProx())
    upper = CompositeObjective(
        ScaledSqNorm(mu_f, dimension=n),
        L1Prox(lam) if lam > 0 else ZeroProx(),
    )

    x_dag = min_norm_ls(a, b)
    null_basis = v[:, rank:]

    def project(x: np.ndarray) -> np.ndarray:
        return x_dag + null_basis @ (null_basis.T @ (x - x_dag))

    residual = a @ x_dag - b
    h_star = 0.5 * float(residual @ residual)
    ref = ReferenceTruth(
        h_star=h_star, h_star_tol=1e-10,
        weak_sharp=WeakSharp(alpha=0.5 * sigma[-1] ** 2, order=2.0),
        projector=project, projector_kind="exact",
    )
    problem = BilevelProblem(upper, lower, reference=ref,
                             initial_point=np.ones(n), name="rank_deficient_ls")

    if lam == 0.0:
        ref.x_star = x_dag
        ref.f_star = upper.value(x_dag)
        ref.f_star_tol = 1e-10
        g_star = mu_f * x_dag
        ref.subgradient = SubgradientAtOpt(g_star, float(np.linalg.norm(g_star)))
    elif f_star_budget > 0:
        from .solvers import FixedEtaSchedule, SolverConfig, solve_r_vfista

        cfg = SolverConfig(big_k=f_star_budget, schedule=FixedEtaSchedule(f_star_eta),
                           trace_every=f_star_budget, x0=x_dag)
        x_star = solve_r_vfista(problem, cfg).x_final
        g_star = min_norm_l1_subgradient(mu_f * x_star, lam, x_star)
        g_norm = float(np.linalg.norm(g_star))
        alpha = ref.weak_sharp.alpha
        ref.x_star = x_star
        ref.f_star = upper.value(x_star)
        # Tikhonov-path bias of the manufactured optimum: f_star true
        # exceeds the estimate by at most ||g*||^2 * eta / alpha
        ref.f_star_tol = f_star_eta * g_norm * g_norm / alpha + 1e-10
        ref.subgradient = SubgradientAtOpt(g_star, g_norm)
        ref.notes.update(f_star_eta=f_star_eta, f_star_budget=f_star_budget)
    return problem


def gen_l1_weak_sharp(n: int, c: np.ndarray) -> BilevelProblem:
    """Lower level ||x||_1 (solution set {0}, weak sharp of order 1 with
    alpha = 1), upper level 0.5*||x - c||^2. Everything about the solution
    is analytic: x* = 0, f* = ||c||^2/2, subgradient -c."""
    c = np.asarray(c, dtype=float)
    n = int(n)
    if c.shape != (n,):
        raise ConfigurationError("center c must have length n")
    lower = CompositeObjective(ZeroFunction(n), L1Prox(1.0))
    upper = CompositeObjective(ScaledSqNorm(1.0, center=c), ZeroProx())
    ref = ReferenceTruth(
        h_star=0.0, h_star_tol=1e-12,
        f_star=0.5 * float(c @ c), f_star_tol=1e-12,
        x_star=np.zeros(n),
        weak_sharp=WeakSharp(alpha=1.0, order=1.0),
        projector=lambda x: np.zeros(n), projector_kind="exact",
        subgradient=SubgradientAtOpt(-c, float(np.linalg.norm(c))),
    )
    return BilevelProblem(upper, lower, reference=ref,
                          initial_point=np.ones(n), name="l1_weak_sharp")


def gen_sec61_inverse(which: str, n: int, mu_f: float = 1.0,
                      lam: float = 1.0) -> BilevelProblem:
    """The strongly convex selection problem on an ill-posed system:
    upper (mu_f/2)||x||^2 + lam*||x||_1 over the minimizers of
    0.5*||Ax - b||^2 for one of the Fredholm test matrices. The lower optimum
    is numerically 0 (b lies in the numerical range of A); no further truth
    is attached."""
    a, b = inverse_problem(which, n)
    lower = CompositeObjective(LeastSquares(a, b), ZeroProx())
    upper = CompositeObjective(
        ScaledSqNorm(mu_f, dimension=n),
        L1Prox(lam) if lam > 0 else ZeroProx(),
    )
    x_dag = min_norm_ls(a, b)
    residual = a @ x_dag - b
    h_at_dag = 0.5 * float(residual @ residual)
    ref = ReferenceTruth(h_star=0.0, h_star_tol=max(1e-10, h_at_dag))
    return BilevelProblem(upper, lower, reference=ref,
                          initial_point=np.ones(n), name=f"sec61_{which}")


def gen_nonconvex_sec6(n: int, which: str = "phillips", delta: float = 1e-2,
                       epsilon: float = 1e-1, with_reference: bool = True,
                       ref_eta: float = 1e-6, ref_budget: int = 1_000_000,
                       projector_eta: float = 1e-6,
                       projector_budget: int = 100_000) -> BilevelProblem:
    """Smooth nonconvex selection: upper objective the Moreau envelope of the
    log-sum penalty, lower level 0.5*||Ax - b||^2 restricted to the unit
    ball. Feasible start x0 = ones/sqrt(n). The lower optimal value is
    manufactured by a long tiny-weight accelerated solve anchored at x0, and
    the projector onto the solution set is the documented approximate one.
    """
    a, b = inverse_problem(which, n)
    lower = CompositeObjective(LeastSquares(a, b), BallProx(1.0))
    upper = CompositeObjective(MoreauLogSum(delta, epsilon, n), ZeroProx())
    x0 = np.ones(n) / math.sqrt(n)
    problem = BilevelProblem(upper, lower, reference=None, initial_point=x0,
                             name=f"nonconvex_sec6_{which}")
    if with_reference:
        solve_ref = approximate_projector(problem, eta=ref_eta, budget=ref_budget)
        x_ref = solve_ref(x0)
        h_star = lower.value(x_ref)
        # the manufactured optimum overshoots h* by at most
        # eta * 0.5*dist(x0, X*)^2 plus the solver tail
        bias = ref_eta * 0.5 * float((x_ref - x0) @ (x_ref - x0))
        problem.reference = ReferenceTruth(
            h_star=h_star, h_star_tol=bias + 1e-10,
            projector=approximate_projector(problem, eta=projector_eta,
                                            budget=projector_budget),
            projector_kind="approximate",
            notes={
                "h_star_eta": ref_eta, "h_star_budget": ref_budget,
                "projector_eta": projector_eta,
                "projector_budget": projector_budget,
            },
        )
    return problem


# ---------------------------------------------------------------------------
# Instance registry (drives the harness) and file round-trip
# ---------------------------------------------------------------------------


def build_instance(spec: InstanceSpec) -> BilevelProblem:
    """Build a bilevel problem from a named instance specification."""
    p = dict(spec.params)
    name, n = spec.name, spec.n
    if name == "rank_deficient_ls":
        return gen_rank_deficient_ls(
            n, rank=int(p.pop("rank", n // 2)), seed=int(spec.seed or 0),
            mu_f=float(p.pop("mu_f", 1.0)), lam=float(p.pop("lam", 0.1)),
            noise_std=float(p.pop("noise_std", 0.0)),
            f_star_budget=int(p.pop("f_star_budget", 0)),
            f_star_eta=float(p.pop("f_star_eta", 1e-9)),
        )
    if name == "l1_weak_sharp":
        rng = np.random.default_rng(spec.seed or 0)
        return gen_l1_weak_sharp(n, rng.standard_normal(n))
    if name in ("sec61_phillips", "sec61_baart", "sec61_foxgood"):
        return gen_sec61_inverse(
            name.split("_", 1)[1], n,
            mu_f=float(p.pop("mu_f", 1.0)), lam=float(p.pop("lam", 1.0)),
        )
    if name in ("nonconvex_phillips", "nonconvex_baart", "nonconvex_foxgood"):
        return gen_nonconvex_sec6(
            n, which=name.split("_", 1)[1],
            delta=float(p.pop("delta", 1e-2)), epsilon=float(p.pop("epsilon", 1e-1)),
            with_reference=bool(int(p.pop("with_reference", 1))),
            ref_eta=float(p.pop("ref_eta", 1e-6)),
            ref_budget=int(p.pop("ref_budget", 1_000_000)),
            projector_eta=float(p.pop("projector_eta", 1e-6)),
            projector_budget=int(p.pop("projector_budget", 100_000)),
        )
    raise ConfigurationError(f"unknown instance name {name!r}")


def save_instance(path, name: str, params: dict, a: Optional[np.ndarray],
                  b: np.ndarray) -> None:
    """Write "key = value" header lines, a blank line, the matrix block
    ("0 0" when absent), a blank line, then the vector block."""
    lines = [f"name = {name}"]
    for key in sorted(params):
        lines.append(f"{key} = {params[key]}")
    header = "\n".join(lines)
    matrix_block = format_matrix(a) if a is not None else "0 0\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n\n" + matrix_block + "\n" + format_vector(b))


def load_instance(path):
    """Inverse of save_instance: returns (name, params, A or None, b)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    # header
    params: dict = {}
    name = None
    i = 0
    while i < len(lines) and lines[i].strip():
        line = lines[i]
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", i + 1)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "name":
            name = value
        else:
            params[key] = value
        i += 1
    if name is None:
        raise ParseError("missing 'name = ...' header line", 1)
    i += 1  # skip blank
    if i >= len(lines):
        raise ParseError("missing matrix block", i + 1)
    if lines[i].split() == ["0", "0"]:
        a = None
        i += 1
    else:
        header = lines[i].split()
        if len(header) != 2:
            raise ParseError(f"expected matrix 'm n' header, got {lines[i]!r}", i + 1)
        try:
            m = int(header[0])
        except ValueError:
            raise ParseError(f"non-integer matrix dimensions {lines[i]!r}", i + 1)
        a = parse_matrix_lines(lines[i:i + m + 1], first_lineno=i + 1)
        i += m + 1
    if i >= len(lines) or lines[i].strip():
        raise ParseError("expected a blank line before the vector block", i + 1)
    i += 1
    vec = parse_matrix_lines(lines[i:], first_lineno=i + 1)
    if vec.shape[0] != 1:
        raise ParseError("vector block must have header '1 n'", i + 1)
    return name, params, a, vec[0]


def generate_instance_arrays(spec: InstanceSpec):
    """(A, b) arrays for `save_instance`, per instance name."""
    name, n = spec.name, spec.n
    if name in _MATRIX_GENERATORS:
        return inverse_problem(name, n)
    if name == "rank_deficient_ls":
        prob = gen_rank_deficient_ls(
            n, rank=int(spec.params.get("rank", n // 2)), seed=int(spec.seed or 0),
            lam=float(spec.params.get("lam", 0.1)),
        )
        ls = prob.lower.smooth
        return ls.a, ls.b
    if name == "l1_weak_sharp":
        rng = np.random.default_rng(spec.seed or 0)
        return None, rng.standard_normal(n)
    raise ConfigurationError(f"no array form for instance {name!r}")
