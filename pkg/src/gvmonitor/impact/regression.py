"""OLS and NB2 negative-binomial regression on the daily panel.

OLS solves the normal equations through a pivoted QR decomposition (rank
failures name the collinear columns). The negative binomial uses the NB2
parameterization (variance mu + alpha*mu^2): beta by iteratively
reweighted least squares at fixed alpha, alpha by outer-loop maximum
likelihood from a moment-based start, alternating until the relative
log-likelihood change drops below 1e-8 (at most 100 outer iterations).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg, optimize
from scipy.special import gammaln
from scipy.stats import norm

from ..errors import ConvergenceError, DatasetError
from .panel import PanelObservation

DEFAULT_COVARIATES = (
    "intervention",
    "treatment",
    "intervention_treatment",
    "number_cases",
    "number_victims",
    "avg_population",
)

_Z95 = float(norm.ppf(0.975))

_RANK_TOL = 1e-10
_OUTER_TOL = 1e-8
_MAX_OUTER = 100
_ETA_CLIP = 30.0


@dataclass(frozen=True)
class RegressionFit:
    """A fitted model: named coefficients, SEs, CIs, and fit statistics."""

    kind: str  # "OLS" | "NegBin"
    names: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    conf_int: np.ndarray  # (p, 2) lower/upper at 95%
    log_likelihood: float
    n: int
    dispersion: float | None = None  # NegBin alpha
    r_squared: float | None = None
    adj_r_squared: float | None = None
    f_statistic: float | None = None
    residuals: np.ndarray = field(default=None, repr=False)
    fitted_values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.coefficients) != len(self.standard_errors):
            raise ValueError("coefficient and SE vectors must have equal length")
        if self.n <= len(self.coefficients):
            raise ValueError("need more observations than coefficients")

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(
                f"no coefficient {name!r}; fitted: {', '.join(self.names)}"
            ) from None

    def coef(self, name: str) -> float:
        return float(self.coefficients[self._index(name)])

    def se(self, name: str) -> float:
        return float(self.standard_errors[self._index(name)])


def design_matrix(
    panel: Sequence[PanelObservation], covariates: Sequence[str] = DEFAULT_COVARIATES
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """(X, y, names) with an intercept column plus the requested covariates."""
    if not panel:
        raise DatasetError("empty panel")
    columns = {"intercept": np.ones(len(panel))}
    getters = {
        "intervention": lambda o: o.intervention,
        "treatment": lambda o: o.treatment,
        "intervention_treatment": lambda o: o.intervention * o.treatment,
        "number_cases": lambda o: o.number_cases,
        "number_victims": lambda o: o.number_victims,
        "avg_population": lambda o: o.avg_population,
    }
    for name in covariates:
        if name not in getters:
            raise DatasetError(f"unknown covariate {name!r}")
        columns[name] = np.array([getters[name](o) for o in panel], dtype=np.float64)
    names = ("intercept", *covariates)
    X = np.column_stack([columns[n] for n in names])
    y = np.array([o.replies for o in panel], dtype=np.float64)
    return X, y, names


def _check_full_rank(X: np.ndarray, names: Sequence[str]) -> None:
    # Greedy Gram-Schmidt in column order, so the error names the *later*
    # column that duplicates an earlier one (e.g. a constant covariate gets
    # flagged, not the intercept it shadows).
    n, p = X.shape
    basis = np.empty((n, 0))
    collinear: list[str] = []
    for j in range(p):
        col = X[:, j].astype(np.float64)
        norm = np.linalg.norm(col)
        if norm == 0:
            collinear.append(names[j])
            continue
        resid = col - basis @ (basis.T @ col)
        resid -= basis @ (basis.T @ resid)  # re-orthogonalize for stability
        if np.linalg.norm(resid) <= _RANK_TOL * max(n, p) * norm:
            collinear.append(names[j])
        else:
            basis = np.column_stack([basis, resid / np.linalg.norm(resid)])
    if collinear:
        raise DatasetError(
            f"design matrix is rank-deficient; collinear columns: {', '.join(collinear)}"
        )


def fit_ols_xy(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> RegressionFit:
    """OLS by QR; classical SEs from sigma^2 (X'X)^-1; normal-theory CIs."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n <= p:
        raise DatasetError(f"need n > p; got n={n}, p={p}")
    _check_full_rank(X, names)
    q, r = linalg.qr(X, mode="economic")
    beta = linalg.solve_triangular(r, q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    sigma2 = rss / (n - p)
    r_inv = linalg.solve_triangular(r, np.eye(p))
    cov = sigma2 * (r_inv @ r_inv.T)
    se = np.sqrt(np.diag(cov))
    ci = np.column_stack([beta - _Z95 * se, beta + _Z95 * se])
    y_centered = y - y.mean()
    tss = float(y_centered @ y_centered)
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p) if tss > 0 else 1.0
    f_stat = None
    if p > 1 and rss > 0:
        f_stat = ((tss - rss) / (p - 1)) / (rss / (n - p))
    sigma2_mle = rss / n
    if sigma2_mle > 0:
        ll = -0.5 * n * (math.log(2 * math.pi * sigma2_mle) + 1.0)
    else:
        ll = float("inf")
    return RegressionFit(
        kind="OLS",
        names=tuple(names),
        coefficients=beta,
        standard_errors=se,
        conf_int=ci,
        log_likelihood=ll,
        n=n,
        r_squared=r2,
        adj_r_squared=adj,
        f_statistic=f_stat,
        residuals=resid,
        fitted_values=fitted,
    )


def fit_ols(
    panel: Sequence[PanelObservation],
    covariates: Sequence[str] = DEFAULT_COVARIATES,
) -> RegressionFit:
    X, y, names = design_matrix(panel, covariates)
    return fit_ols_xy(X, y, names)


# -- negative binomial (NB2) -------------------------------------------------


def _nb2_loglik(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    r = 1.0 / alpha
    return float(
        np.sum(
            gammaln(y + r)
            - gammaln(r)
            - gammaln(y + 1.0)
            - r * np.log1p(mu / r)
            + y * (np.log(mu) - np.log(r + mu))
        )
    )


def _mu_of(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return np.exp(np.clip(X @ beta, -_ETA_CLIP, _ETA_CLIP))


def _poisson_irls(X: np.ndarray, y: np.ndarray, max_iter: int = 50) -> np.ndarray:
    """Poisson GLM fit, used for the starting point and moment estimate."""
    n, p = X.shape
    beta = np.zeros(p)
    beta[0] = math.log(max(y.mean(), 1e-8))
    dev_prev = None
    for _ in range(max_iter):
        mu = _mu_of(X, beta)
        w = mu
        z = (X @ beta) + (y - mu) / mu
        beta = linalg.lstsq(np.sqrt(w)[:, None] * X, np.sqrt(w) * z)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(y > 0, y * np.log(y / mu), 0.0)
        dev = 2.0 * float(np.sum(term - (y - mu)))
        if dev_prev is not None and abs(dev - dev_prev) <= 1e-10 * (abs(dev_prev) + 1.0):
            break
        dev_prev = dev
    return beta


def _negbin_beta_step(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, alpha: float, max_iter: int = 50
) -> np.ndarray:
    """IRLS for beta at fixed alpha: weights mu/(1+alpha*mu)."""
    for _ in range(max_iter):
        mu = _mu_of(X, beta)
        w = mu / (1.0 + alpha * mu)
        z = (X @ beta) + (y - mu) / mu
        sw = np.sqrt(w)
        new_beta = linalg.lstsq(sw[:, None] * X, sw * z)[0]
        if np.max(np.abs(new_beta - beta)) <= 1e-10 * (np.max(np.abs(beta)) + 1.0):
            beta = new_beta
            break
        beta = new_beta
    return beta


def _alpha_step(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    """Maximize the NB2 log-likelihood over alpha at fixed mu."""
    lo, hi = 1e-10, 1e6
    result = optimize.minimize_scalar(
        lambda a: -_nb2_loglik(y, mu, a),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(np.clip(result.x, lo, hi))


def fit_negbin(
    panel: Sequence[PanelObservation],
    covariates: Sequence[str] = DEFAULT_COVARIATES,
) -> RegressionFit:
    X, y, names = design_matrix(panel, covariates)
    return fit_negbin_xy(X, y, names)


def fit_negbin_xy(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> RegressionFit:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if n <= p:
        raise DatasetError(f"need n > p; got n={n}, p={p}")
    if np.any(y < 0) or np.any(y != np.floor(y)):
        raise DatasetError("outcome must be non-negative integer counts")
    if not np.any(y > 0):
        raise DatasetError("outcome is all zeros; nothing to model")
    _check_full_rank(X, names)

    beta = _poisson_irls(X, y)
    mu = _mu_of(X, beta)
    # moment-based start: solve sum((y-mu)^2 - mu) = alpha * sum(mu^2)
    alpha = float(np.sum((y - mu) ** 2 - mu) / np.sum(mu**2))
    alpha = min(max(alpha, 1e-8), 1e4)

    ll_prev = None
    trace: list[float] = []
    converged = False
    for _ in range(_MAX_OUTER):
        beta = _negbin_beta_step(X, y, beta, alpha)
        mu = _mu_of(X, beta)
        alpha = _alpha_step(y, mu, alpha)
        ll = _nb2_loglik(y, mu, alpha)
        trace.append(ll)
        if ll_prev is not None and abs(ll - ll_prev) <= _OUTER_TOL * (abs(ll_prev) + 1e-12):
            converged = True
            break
        ll_prev = ll
    if not converged:
        raise ConvergenceError(
            f"negative binomial fit did not converge in {_MAX_OUTER} iterations",
            trace=trace,
        )

    w = mu / (1.0 + alpha * mu)
    info = X.T @ (X * w[:, None])
    cov = np.linalg.inv(info)
    se = np.sqrt(np.diag(cov))
    ci = np.column_stack([beta - _Z95 * se, beta + _Z95 * se])
    return RegressionFit(
        kind="NegBin",
        names=tuple(names),
        coefficients=beta,
        standard_errors=se,
        conf_int=ci,
        log_likelihood=trace[-1],
        n=n,
        dispersion=alpha,
        residuals=y - mu,
        fitted_values=mu,
    )


def cox_snell(fit: RegressionFit, null_fit: RegressionFit) -> float:
    """Pseudo R-squared: 1 - exp(-2 (ll_model - ll_null) / n)."""
    if fit.n != null_fit.n:
        raise DatasetError(f"fits cover different n: {fit.n} vs {null_fit.n}")
    return 1.0 - math.exp(-2.0 * (fit.log_likelihood - null_fit.log_likelihood) / fit.n)


def _stars(p_value: float) -> str:
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def format_fit_report(fit: RegressionFit) -> str:
    """Regression table: coefficient, 95% CI, significance stars."""
    lines = [
        f"{fit.kind} regression (n={fit.n})",
        f"log-likelihood: {fit.log_likelihood:.3f}",
    ]
    if fit.dispersion is not None:
        lines.append(f"dispersion alpha: {fit.dispersion:.4f}")
    if fit.r_squared is not None:
        lines.append(f"R^2 {fit.r_squared:.4f}  adj {fit.adj_r_squared:.4f}")
    lines.append(f"{'term':<24}{'coef':>12}{'ci low':>12}{'ci high':>12}  sig")
    for i, name in enumerate(fit.names):
        coef = fit.coefficients[i]
        se = fit.standard_errors[i]
        lo, hi = fit.conf_int[i]
        z = coef / se if se > 0 else float("inf")
        p_value = 2.0 * (1.0 - norm.cdf(abs(z)))
        lines.append(f"{name:<24}{coef:>12.3f}{lo:>12.3f}{hi:>12.3f}  {_stars(p_value)}")
    return "\n".join(lines)


def write_fit_report(fit: RegressionFit, path: str | Path) -> None:
    Path(path).write_text(format_fit_report(fit) + "\n", encoding="utf-8")
