"""Error metrics and inequality checkers for the approximation pipeline.

Two layers live here:

* ``evaluate_approximations`` / ``error_report`` measure the relative
  error inflations of a sketch-and-truncate run against the best
  rank-k approximation (projection, Nystrom, lifted Nystrom, plus the
  three eigenvalue-wise metrics);
* ``verify_theorem`` checks one named inequality on one instance. The
  checker computes the inequality's epsilon from its premise and then
  tests its conclusion, so a verdict certifies the implication rather
  than a fixed epsilon.

Checker verdicts allow ``lhs <= rhs + slack`` with slack
``1e-9 * scale(rhs)``; the scale falls back to a small fraction of the
ambient norm when the right-hand side is exactly zero. Hypothesis
failures are reported on the verdict (held vacuously), never skipped
silently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .functions import ScalarFunction, apply_matrix_function
from .linalg import LowRankFactor, SpsdMatrix, psd_order, schatten_from_values
from .nystrom import (
    funnystrom,
    nystrom_truncated,
    projection_one_sided,
    projection_two_sided,
)
from .sketch import (
    OrthonormalBasis,
    SketchConfig,
    explicit_basis,
    gaussian_basis,
    krylov_basis,
    orthonormal_columns,
    rng_for,
    rpcholesky_basis,
)

DEFAULT_SLACK = 1e-9
SLACK_FLOOR_FRAC = 1e-4
DEGENERATE_REL_TOL = 1e-13


# ---------------------------------------------------------------------------
# error reports


@dataclass
class EigenvalueErrors:
    """The three eigenvalue-wise relative error maxima."""

    projection: float
    nystrom: float
    funnystrom: float


@dataclass
class ErrorReport:
    """Relative error inflations for one (A, Q, k, f) run in one norm.

    eps_* are ||A - X|| / ||A - A_(k)|| - 1 for the one-sided
    projection, the truncated Nystrom approximation, and its lift
    (numerator and denominator at the f level for the latter).
    ``degenerate`` marks a zero optimal error in the denominator; the
    policy reports 0 when the numerator is also numerically zero and
    inf otherwise.
    """

    norm: str
    eps_projection: float
    eps_nystrom: float
    eps_funnystrom: float
    eigenvalue_errors: EigenvalueErrors
    degenerate: bool = False
    metadata: dict = field(default_factory=dict)


@dataclass
class ApproxEvaluation:
    """Cached measurements for one (A, Q, k, f) run.

    The singular value vectors of the three difference matrices are
    stored so that any Schatten norm can be read off without touching
    the dense matrices again.
    """

    n: int
    k: int
    k_eff: int
    lam: np.ndarray
    f_lam: np.ndarray
    lam_hat: np.ndarray
    f_lam_hat: np.ndarray
    sigma_qta: np.ndarray
    proj_diff_svals: np.ndarray
    nys_diff_svals: np.ndarray
    fun_diff_svals: np.ndarray
    metadata: dict


def evaluate_approximations(a, basis, k, f, *, fa=None):
    """Run the pipeline once and collect everything the metrics need.

    ``fa`` can pass a precomputed f(A) when sweeping many bases against
    the same matrix.
    """
    factor = nystrom_truncated(a, basis, k)
    k_eff = factor.k
    proj = projection_one_sided(a, basis, k_eff)
    lifted = funnystrom(factor, f)
    if fa is None:
        fa = apply_matrix_function(a, f)
    qm = basis.q
    prov = basis.provenance
    metadata = {
        "scheme": prov.scheme,
        "n": a.n,
        "k": k,
        "k_eff": k_eff,
        "ell": basis.ell,
        "q": prov.depth,
        "seed": prov.seed,
        "function": f.label,
        "collapsed": basis.collapsed,
    }
    return ApproxEvaluation(
        n=a.n,
        k=k,
        k_eff=k_eff,
        lam=a.eigenvalues,
        f_lam=np.asarray(f(a.eigenvalues), dtype=float),
        lam_hat=factor.lam.copy(),
        f_lam_hat=lifted.lam.copy(),
        sigma_qta=np.linalg.svd(qm.T @ a.entries, compute_uv=False),
        proj_diff_svals=np.linalg.svd(a.entries - proj.matrix(), compute_uv=False),
        nys_diff_svals=np.abs(np.linalg.eigvalsh(a.entries - factor.matrix())),
        fun_diff_svals=np.abs(np.linalg.eigvalsh(fa.entries - lifted.matrix())),
        metadata=metadata,
    )


def _inflation(numerator, denominator, scale):
    """num/den - 1 with the degenerate-denominator policy."""
    if denominator > DEGENERATE_REL_TOL * max(scale, 1e-300):
        return numerator / denominator - 1.0, False
    if numerator <= DEGENERATE_REL_TOL * max(scale, 1e-300):
        return 0.0, True
    return float("inf"), True


def _eig_error(target, approx):
    """max_i (target_i - approx_i) / target_i, skipping zero targets."""
    t = np.asarray(target, dtype=float)
    ap = np.asarray(approx, dtype=float)
    mask = t > 0.0
    if not mask.any():
        return 0.0
    return float(((t - ap)[mask] / t[mask]).max())


def _padded(values, m):
    out = np.zeros(m)
    r = min(len(values), m)
    out[:r] = values[:r]
    return out


def report_from_evaluation(ev, kind):
    """Read one norm's ErrorReport off a cached evaluation."""
    k = ev.k_eff
    denom = schatten_from_values(ev.lam[k:], kind)
    denom_f = schatten_from_values(ev.f_lam[k:], kind)
    scale = schatten_from_values(ev.lam, kind)
    scale_f = schatten_from_values(ev.f_lam, kind)
    eps_p, deg_p = _inflation(schatten_from_values(ev.proj_diff_svals, kind), denom, scale)
    eps_n, deg_n = _inflation(schatten_from_values(ev.nys_diff_svals, kind), denom, scale)
    eps_f, deg_f = _inflation(schatten_from_values(ev.fun_diff_svals, kind), denom_f, scale_f)
    lam_top = ev.lam[:k]
    f_top = ev.f_lam[:k]
    fn = ev.metadata.get("function")
    eig = EigenvalueErrors(
        projection=_eig_error(lam_top, _padded(ev.sigma_qta, k)),
        nystrom=_eig_error(lam_top, _padded(ev.lam_hat, k)),
        funnystrom=_eig_error(f_top, _padded(ev.f_lam_hat, k)),
    )
    return ErrorReport(
        norm=kind.label,
        eps_projection=eps_p,
        eps_nystrom=eps_n,
        eps_funnystrom=eps_f,
        eigenvalue_errors=eig,
        degenerate=deg_p or deg_n or deg_f,
        metadata=dict(ev.metadata),
    )


def error_report(a, basis, k, f, kind, *, fa=None):
    """One-shot ErrorReport for (A, Q, k, f) in the given norm."""
    return report_from_evaluation(evaluate_approximations(a, basis, k, f, fa=fa), kind)


# ---------------------------------------------------------------------------
# theorem checking


@dataclass
class TheoremVerdict:
    """Outcome of one inequality check.

    ``lhs`` and ``rhs`` are the two sides as measured (for the
    eigenvalue-wise checkers, lhs is the worst violation margin and rhs
    is zero). ``hypothesis_met=False`` marks a vacuously held verdict;
    ``informational`` marks checks that are logged but not gating.
    """

    theorem_id: str
    holds: bool
    lhs: float
    rhs: float
    slack_used: float
    inputs_digest: str
    hypothesis_met: bool = True
    informational: bool = False
    detail: str = ""
    seed: int | None = None

    def line(self):
        seed = "" if self.seed is None else str(self.seed)
        return (
            f"{self.theorem_id},{str(self.holds).lower()},{self.lhs:.17g},"
            f"{self.rhs:.17g},{self.slack_used:.17g},{seed}"
        )

    def to_dict(self):
        return {
            "theorem_id": self.theorem_id,
            "holds": self.holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack_used": self.slack_used,
            "inputs_digest": self.inputs_digest,
            "hypothesis_met": self.hypothesis_met,
            "informational": self.informational,
            "detail": self.detail,
            "seed": self.seed,
        }


def verdict_lines(verdicts):
    return "\n".join(v.line() for v in verdicts)


def verdicts_to_json(verdicts):
    return json.dumps([v.to_dict() for v in verdicts], indent=2)


@dataclass
class TheoremInstance:
    """One instance the checkers can be pointed at.

    ``a_hat`` is the untruncated approximation the black-box checkers
    take as given (for grey-box checkers it must be the Nystrom factor
    built from ``basis``); ``b`` optionally overrides the comparator of
    the spectral black-box check.
    """

    a: SpsdMatrix
    k: int
    f: ScalarFunction
    basis: OrthonormalBasis | None = None
    a_hat: LowRankFactor | None = None
    b: LowRankFactor | None = None
    p: float = 2.0
    seed: int | None = None
    _fa: SpsdMatrix | None = field(default=None, repr=False, compare=False)

    def fa(self):
        if self._fa is None:
            self._fa = apply_matrix_function(self.a, self.f)
        return self._fa


def sketch_instance(a, basis, k, f, *, p=2.0, seed=None):
    """Instance whose a_hat is the untruncated Nystrom factor of basis."""
    full = nystrom_truncated(a, basis, basis.ell)
    return TheoremInstance(a=a, k=k, f=f, basis=basis, a_hat=full, p=p, seed=seed)


def _digest(inst):
    h = hashlib.sha256()
    h.update(inst.a.entries.tobytes())
    if inst.basis is not None:
        h.update(inst.basis.q.tobytes())
    if inst.a_hat is not None:
        h.update(inst.a_hat.u.tobytes())
        h.update(inst.a_hat.lam.tobytes())
    if inst.b is not None:
        h.update(inst.b.u.tobytes())
        h.update(inst.b.lam.tobytes())
    h.update(f"{inst.k}|{inst.f.label}|{inst.p}".encode())
    return h.hexdigest()[:12]


def _slack(rhs, ambient):
    scale = max(abs(rhs), SLACK_FLOOR_FRAC * abs(ambient))
    return DEFAULT_SLACK * max(scale, np.finfo(float).tiny)


def _premise_eps(numerator, denominator, ambient):
    """Epsilon extracted from a premise ratio, clipped at zero.

    Returns (eps, ok); ok is False when the denominator is numerically
    zero while the numerator is not, which leaves the premise unusable.
    """
    value, degenerate = _inflation(numerator, denominator, ambient)
    if degenerate and not np.isfinite(value):
        return 0.0, False
    return max(value, 0.0), True


def _verdict(theorem_id, inst, lhs, rhs, ambient, *, hypothesis_met=True,
             detail="", lower_ok=True):
    slack = _slack(rhs, ambient)
    holds = bool(hypothesis_met and lower_ok and lhs <= rhs + slack) or not hypothesis_met
    return TheoremVerdict(
        theorem_id=theorem_id,
        holds=holds,
        lhs=float(lhs),
        rhs=float(rhs),
        slack_used=float(slack),
        inputs_digest=_digest(inst),
        hypothesis_met=bool(hypothesis_met),
        detail=detail,
        seed=inst.seed,
    )


def _require(inst, *names):
    for name in names:
        if getattr(inst, name) is None:
            raise DimensionMismatchError(
                f"theorem instance is missing {name!r} for this checker"
            )


def _sym_schatten_p(m, p):
    """||M||_(p)^p for symmetric M via its eigenvalues."""
    w = np.abs(np.linalg.eigvalsh(m))
    if np.isinf(p):
        return float(w.max(initial=0.0))
    return float((w ** p).sum())


def _check_blackbox_schatten(inst, p, theorem_id):
    """Schatten-p trace-difference premise to the lifted conclusion;
    p = 1 and p = 2 are the nuclear and Frobenius special cases."""
    _require(inst, "a_hat")
    lam = inst.a.eigenvalues
    k = inst.k
    hyp = psd_order(inst.a, inst.a_hat.matrix())
    ahk = inst.a_hat.truncate(k)
    tail_p = float((lam[k:] ** p).sum())
    premise = float((lam ** p).sum()) - float((ahk.lam ** p).sum())
    eps, usable = _premise_eps(premise, tail_p, float((lam ** p).sum()))
    f_lam = np.asarray(inst.f(lam), dtype=float)
    f_tail_p = float((f_lam[k:] ** p).sum())
    lifted = funnystrom(ahk, inst.f)
    lhs = _sym_schatten_p(inst.fa().entries - lifted.matrix(), p)
    rhs = (1.0 + eps) * f_tail_p
    ambient = float((f_lam ** p).sum())
    return _verdict(theorem_id, inst, lhs, rhs, ambient,
                    hypothesis_met=hyp and usable,
                    detail=f"p={p:g},eps={eps:.3e}")


def check_nuclear_blackbox(inst):
    return _check_blackbox_schatten(inst, 1.0, "T_nuclear_blackbox")


def check_frobenius_blackbox(inst):
    return _check_blackbox_schatten(inst, 2.0, "T_frobenius_blackbox")


def check_schatten_blackbox(inst):
    return _check_blackbox_schatten(inst, float(inst.p), "T_schatten_blackbox")


def check_spectral_blackbox(inst):
    """Operator-norm check: needs A, B PSD but no PSD ordering.

    The comparator defaults to the truncated Nystrom factor; the
    conclusion compares f(A) against the rank-r truncation of f(B),
    which the lift produces because factors drop zero directions.
    """
    _require(inst, "a_hat")
    b = inst.b if inst.b is not None else inst.a_hat.truncate(inst.k)
    lam = inst.a.eigenvalues
    k = inst.k
    lam_next = float(lam[k]) if k < inst.a.n else 0.0
    premise = float(np.abs(np.linalg.eigvalsh(inst.a.entries - b.matrix())).max())
    eps, usable = _premise_eps(premise, lam_next, float(lam[0]) if lam.size else 0.0)
    lifted = funnystrom(b, inst.f)
    lhs = _sym_schatten_p(inst.fa().entries - lifted.matrix(), np.inf)
    f_next = float(inst.f(np.asarray(lam_next)))
    rhs = (1.0 + eps) * f_next
    ambient = float(inst.f(np.asarray(lam[0]))) if lam.size else 0.0
    return _verdict("T_spectral_blackbox", inst, lhs, rhs, ambient,
                    hypothesis_met=usable, detail=f"rank_b={b.rank},eps={eps:.3e}")


def _eig_hypothesis(inst):
    """Shared setup for the eigenvalue-wise checks: top-k values of A,
    padded estimates, and the sanity that estimates never exceed targets."""
    _require(inst, "a_hat")
    lam = inst.a.eigenvalues
    k = inst.k
    est = _padded(inst.a_hat.truncate(k).lam, k)
    top = lam[:k]
    upper_ok = bool((est - top).max(initial=0.0) <= 1e-12 * max(lam[0], 1.0))
    return lam, top, est, upper_ok


def check_eig_absolute(inst):
    """0 <= lam_i - est_i <= eps lam_(k+1) lifts to f with the same eps,
    for concave non-decreasing f and eps <= 1."""
    lam, top, est, upper_ok = _eig_hypothesis(inst)
    k = inst.k
    lam_next = float(lam[k]) if k < inst.a.n else 0.0
    diffs = top - est
    if lam_next > DEGENERATE_REL_TOL * max(lam[0], 1e-300):
        eps = max(float(diffs.max(initial=0.0)), 0.0) / lam_next
        usable = eps <= 1.0 + 1e-12
    else:
        eps, usable = 0.0, bool(diffs.max(initial=0.0) <= 1e-12 * max(lam[0], 1.0))
    hyp = upper_ok and usable and inst.f.concave and inst.f.non_decreasing
    f_top = np.asarray(inst.f(top), dtype=float)
    f_est = np.asarray(inst.f(est), dtype=float)
    fdiffs = f_top - f_est
    ambient = float(inst.f(np.asarray(lam[0]))) if lam.size else 0.0
    slack = _slack(0.0, ambient)
    lhs = float(fdiffs.max(initial=0.0))
    rhs = min(eps, 1.0) * float(inst.f(np.asarray(lam_next)))
    return _verdict("T_eig_abs", inst, lhs, rhs, ambient,
                    hypothesis_met=hyp,
                    lower_ok=bool(fdiffs.min(initial=0.0) >= -slack),
                    detail=f"eps={eps:.3e}")


def check_eig_relative(inst):
    """0 <= lam_i - est_i <= eps lam_i lifts to f(lam_i) - f(est_i) <=
    eps f(lam_i) for concave non-decreasing f."""
    lam, top, est, upper_ok = _eig_hypothesis(inst)
    mask = top > 0.0
    if mask.any():
        eps = max(float(((top - est)[mask] / top[mask]).max()), 0.0)
        zeros_ok = bool((top[~mask] - est[~mask]).max(initial=0.0) <= 1e-12)
    else:
        eps, zeros_ok = 0.0, True
    eps = min(eps, 1.0)
    hyp = upper_ok and zeros_ok and inst.f.concave and inst.f.non_decreasing
    f_top = np.asarray(inst.f(top), dtype=float)
    f_est = np.asarray(inst.f(est), dtype=float)
    margins = (f_top - f_est) - eps * f_top
    ambient = float(inst.f(np.asarray(lam[0]))) if lam.size else 0.0
    slack = _slack(0.0, ambient)
    lower_ok = bool((f_top - f_est).min(initial=0.0) >= -slack)
    return _verdict("T_eig_rel", inst, float(margins.max(initial=0.0)), 0.0,
                    ambient, hypothesis_met=hyp, lower_ok=lower_ok,
                    detail=f"eps={eps:.3e}")


def check_frobenius_greybox(inst):
    """Projection premise (squared Frobenius) bounds the Nystrom
    trace-difference quantity with the same eps."""
    _require(inst, "basis", "a_hat")
    lam = inst.a.eigenvalues
    k = inst.k
    proj = projection_one_sided(inst.a, inst.basis, k)
    premise = float(np.linalg.norm(inst.a.entries - proj.matrix()) ** 2)
    tail_sq = float((lam[k:] ** 2).sum())
    eps, usable = _premise_eps(premise, tail_sq, float((lam ** 2).sum()))
    ahk = inst.a_hat.truncate(k)
    lhs = float((lam ** 2).sum()) - float((ahk.lam ** 2).sum())
    rhs = (1.0 + eps) * tail_sq
    return _verdict("T_frobenius_greybox", inst, lhs, rhs, float((lam ** 2).sum()),
                    hypothesis_met=usable, detail=f"eps={eps:.3e}")


def check_nuclear_greybox(inst):
    """Projection premise (nuclear) bounds the truncated Nystrom error."""
    _require(inst, "basis", "a_hat")
    lam = inst.a.eigenvalues
    k = inst.k
    proj = projection_one_sided(inst.a, inst.basis, k)
    premise = float(np.linalg.svd(inst.a.entries - proj.matrix(), compute_uv=False).sum())
    tail = float(lam[k:].sum())
    eps, usable = _premise_eps(premise, tail, float(lam.sum()))
    ahk = inst.a_hat.truncate(k)
    lhs = _sym_schatten_p(inst.a.entries - ahk.matrix(), 1.0)
    rhs = (1.0 + eps) * tail
    return _verdict("T_nuclear_greybox", inst, lhs, rhs, float(lam.sum()),
                    hypothesis_met=usable, detail=f"eps={eps:.3e}")


def check_spectral_exact_k(inst):
    """Operator-norm projection premise bounds the untruncated Nystrom
    error; only valid when the basis has exactly k columns."""
    _require(inst, "basis", "a_hat")
    lam = inst.a.eigenvalues
    k = inst.k
    if inst.basis.ell != k:
        return _verdict("T_spectral_exact_k", inst, 0.0, 0.0,
                        float(lam[0]) if lam.size else 0.0,
                        hypothesis_met=False, detail="needs ell == k")
    qm = inst.basis.q
    premise = float(np.linalg.norm(inst.a.entries - qm @ (qm.T @ inst.a.entries), 2))
    lam_next = float(lam[k]) if k < inst.a.n else 0.0
    eps, usable = _premise_eps(premise, lam_next, float(lam[0]))
    lhs = _sym_schatten_p(inst.a.entries - inst.a_hat.matrix(), np.inf)
    rhs = (1.0 + eps) * lam_next
    return _verdict("T_spectral_exact_k", inst, lhs, rhs, float(lam[0]),
                    hypothesis_met=usable, detail=f"eps={eps:.3e}")


def check_eig_greybox(inst):
    """sigma_i(Q^T A) <= est_i <= lam_i for the untruncated factor."""
    _require(inst, "basis", "a_hat")
    lam = inst.a.eigenvalues
    ell = inst.basis.ell
    sigma = np.linalg.svd(inst.basis.q.T @ inst.a.entries, compute_uv=False)
    est = _padded(inst.a_hat.lam, ell)
    top = lam[:ell]
    lower = float((_padded(sigma, ell) - est).max(initial=0.0))
    upper = float((est - top).max(initial=0.0))
    ambient = float(lam[0]) if lam.size else 0.0
    return _verdict("T_eig_greybox", inst, max(lower, upper), 0.0, ambient)


_CHECKERS = {
    "T_nuclear_blackbox": check_nuclear_blackbox,
    "T_frobenius_blackbox": check_frobenius_blackbox,
    "T_schatten_blackbox": check_schatten_blackbox,
    "T_spectral_blackbox": check_spectral_blackbox,
    "T_eig_abs": check_eig_absolute,
    "T_eig_rel": check_eig_relative,
    "T_frobenius_greybox": check_frobenius_greybox,
    "T_nuclear_greybox": check_nuclear_greybox,
    "T_spectral_exact_k": check_spectral_exact_k,
    "T_eig_greybox": check_eig_greybox,
}

THEOREM_IDS = tuple(_CHECKERS)


def verify_theorem(theorem_id, instance):
    """Run one named checker on one instance."""
    if theorem_id not in _CHECKERS:
        raise KeyError(f"unknown theorem id {theorem_id!r} (have {THEOREM_IDS})")
    return _CHECKERS[theorem_id](instance)


# ---------------------------------------------------------------------------
# one-step iteration comparisons


def remark_checks(instance):
    """Frobenius-norm comparisons for one basis improvement step.

    Takes a TheoremInstance with ``a``, ``basis`` and ``k`` set (the
    untruncated factor is built from the basis when absent). Checks,
    each as a verdict with lhs <= rhs expected:

    * one_sided_step / rect_p1: range(A Q) beats range(Q);
    * rect_p2: range(A^2 Q) beats range(Q);
    * two_sided_step: same for the two-sided compression;
    * truncated_vs_one_sided: truncated Nystrom beats the one-sided
      projection;
    * operator_one_sided_step (informational): the operator-norm
      analogue of the first check, which is false in general and only
      logged.
    """
    _require(instance, "basis")
    a = instance.a
    basis = instance.basis
    k = instance.k
    inst = instance
    if inst.a_hat is None:
        inst = TheoremInstance(a=a, k=k, f=inst.f, basis=basis,
                               a_hat=nystrom_truncated(a, basis, basis.ell),
                               seed=inst.seed)
    q0 = basis.q
    q1 = explicit_basis(orthonormal_columns(a.entries @ q0)[0])
    q2 = explicit_basis(orthonormal_columns(a.entries @ (a.entries @ q0))[0])

    def one_sided(bq):
        return np.linalg.norm(a.entries - projection_one_sided(a, bq, k).matrix())

    def one_sided_op(bq):
        return np.linalg.norm(a.entries - projection_one_sided(a, bq, k).matrix(), 2)

    def two_sided(bq):
        return float(np.linalg.norm(a.entries - projection_two_sided(a, bq, k).matrix()))

    ambient = float(np.linalg.norm(a.entries))
    base = one_sided(basis)
    base_two = two_sided(basis)
    nys_err = float(np.linalg.norm(a.entries - inst.a_hat.truncate(k).matrix()))
    out = [
        _verdict("remark_one_sided_step", inst, one_sided(q1), base, ambient),
        _verdict("remark_rect_p1", inst, one_sided(q1), base, ambient),
        _verdict("remark_rect_p2", inst, one_sided(q2), base, ambient),
        _verdict("remark_two_sided_step", inst, two_sided(q1), base_two, ambient),
        _verdict("remark_truncated_vs_one_sided", inst, nys_err, base, ambient),
    ]
    op_step = _verdict("remark_operator_one_sided_step", inst,
                       one_sided_op(q1), one_sided_op(basis), ambient)
    op_step.informational = True
    out.append(op_step)
    return out


# ---------------------------------------------------------------------------
# randomized suite


SUITE_FUNCTION_SPECS = ("sqrt", "log1p", "ridge", "power:alpha=0.3")
SCHATTEN_ORDERS = (1.0, 1.5, 2.0, 3.0)
_SUITE_STREAM = 10_000


def _haar(rng, n, m):
    q, r = np.linalg.qr(rng.standard_normal((n, m)))
    return q * np.sign(np.where(np.diag(r) == 0.0, 1.0, np.diag(r)))


def random_instance(seed, index):
    """Deterministic randomized instance number ``index`` of a suite.

    Rotates the spectrum family, the basis scheme and the scalar
    function; returns (instance, exact_instance) where the second one
    carries an ell = k basis of the same scheme for the exact-rank
    operator check.
    """
    from .functions import parse_function

    rng = rng_for(seed, _SUITE_STREAM + index)
    n = int(rng.integers(8, 41))
    k = int(rng.integers(1, min(8, n // 2) + 1))
    ell = min(k + int(rng.integers(0, 5)), n)
    q = int(rng.integers(0, 3))
    family = index % 3
    if family == 0:
        g = rng.standard_normal((n, n))
        a = SpsdMatrix(g @ g.T / n)
    elif family == 1:
        a = SpsdMatrix.from_spectrum(0.8 ** np.arange(n), _haar(rng, n, n))
    else:
        a = SpsdMatrix.from_spectrum(1.0 / np.arange(1, n + 1), _haar(rng, n, n))
    scheme = ("gaussian", "krylov", "rpcholesky", "explicit")[index % 4]
    basis_seed = int(rng.integers(0, 2**62))
    if scheme == "gaussian":
        basis = gaussian_basis(a, SketchConfig(k=k, ell=ell, q=q, seed=basis_seed))
        exact = gaussian_basis(a, SketchConfig(k=k, ell=k, q=q, seed=basis_seed))
    elif scheme == "krylov":
        depth = min(q, max(n // k - 1, 0))
        basis = krylov_basis(a, SketchConfig(k=k, q=depth, seed=basis_seed))
        exact = krylov_basis(a, SketchConfig(k=k, q=0, seed=basis_seed))
    elif scheme == "rpcholesky":
        basis = rpcholesky_basis(a, ell, basis_seed)
        exact = rpcholesky_basis(a, k, basis_seed)
    else:
        basis = explicit_basis(_haar(rng, n, ell), seed=basis_seed)
        exact = explicit_basis(_haar(rng, n, k), seed=basis_seed)
    f = parse_function(SUITE_FUNCTION_SPECS[index % 4])
    p = SCHATTEN_ORDERS[index % 4]
    inst = sketch_instance(a, basis, k, f, p=p, seed=basis_seed)
    inst_exact = sketch_instance(a, exact, k, f, p=p, seed=basis_seed)
    return inst, inst_exact


def run_theorem_suite(*, instances=200, seed=0):
    """Run every checker on ``instances`` randomized instances.

    The Schatten checker runs at each order in SCHATTEN_ORDERS per
    instance; the exact-rank operator checker gets the companion
    ell = k basis. Returns the flat verdict list.
    """
    if instances < 1:
        raise ValueError("instances must be >= 1")
    out = []
    for index in range(instances):
        inst, inst_exact = random_instance(seed, index)
        out.append(check_nuclear_blackbox(inst))
        out.append(check_frobenius_blackbox(inst))
        for p in SCHATTEN_ORDERS:
            out.append(check_schatten_blackbox(
                TheoremInstance(a=inst.a, k=inst.k, f=inst.f, basis=inst.basis,
                                a_hat=inst.a_hat, p=p, seed=inst.seed, _fa=inst._fa)))
        out.append(check_spectral_blackbox(inst))
        out.append(check_eig_absolute(inst))
        out.append(check_eig_relative(inst))
        out.append(check_frobenius_greybox(inst))
        out.append(check_nuclear_greybox(inst))
        out.append(check_spectral_exact_k(inst_exact))
        out.append(check_eig_greybox(inst))
    return out
