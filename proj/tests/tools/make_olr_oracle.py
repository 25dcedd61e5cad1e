"""Fits a proportional-odds model with statsmodels and freezes the result.

    python3 tests/tools/make_olr_oracle.py tests/fixtures/olr_oracle.json
"""
import json
import sys

import numpy as np
from statsmodels.miscmodels.ordinal_model import OrderedModel


def main(out):
    rng = np.random.default_rng(77)
    n = 400
    x = np.column_stack([rng.uniform(0, 1, n), rng.normal(0, 1, n)])
    eta = x @ np.array([-4.0, 0.7])
    theta = np.array([-2.0, 0.5])
    u = rng.uniform(size=n)
    cdf = 1 / (1 + np.exp(-(theta[None, :] - eta[:, None])))
    y = (u[:, None] > cdf).sum(axis=1)

    res = OrderedModel(y, x, distr="logit").fit(method="newton", maxiter=200, tol=1e-12, disp=False)
    p = res.params
    k = x.shape[1]
    beta = p[:k]
    thresholds = np.cumsum(np.concatenate([[p[k]], np.exp(p[k + 1:])]))
    json.dump({
        "y": y.tolist(),
        "x": x.tolist(),
        "beta": beta.tolist(),
        "thresholds": thresholds.tolist(),
        "log_likelihood": float(res.llf),
        "aic": float(res.aic),
        "beta_std_errors": res.bse[:k].tolist(),
    }, open(out, "w"), indent=1)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/olr_oracle.json")
