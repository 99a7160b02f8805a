"""Regenerates glm_fixture.csv and glm_oracle.json.

The oracle maximizes the logistic log-likelihood directly with a generic
quasi-Newton optimizer (scipy BFGS on the negative log-likelihood), so it
shares no code path with the IRLS fitter under test.
"""
import json
import pathlib

import numpy as np
from scipy.optimize import minimize

here = pathlib.Path(__file__).resolve().parent.parent
rng = np.random.default_rng(20240517)
n = 20
x1 = np.round(rng.normal(0.0, 1.0, n), 3)
x2 = np.round(rng.uniform(0.0, 4.0, n), 3)
eta = -0.4 + 1.1 * x1 - 0.35 * x2
y = (rng.uniform(size=n) < 1 / (1 + np.exp(-eta))).astype(int)

X = np.column_stack([np.ones(n), x1, x2])


def nll(beta):
    e = X @ beta
    return np.sum(np.logaddexp(0.0, e) - y * e)


def grad(beta):
    p = 1 / (1 + np.exp(-(X @ beta)))
    return X.T @ (p - y)


res = minimize(nll, np.zeros(3), jac=grad, method="BFGS", options={"gtol": 1e-12, "maxiter": 10000})
assert res.success or np.max(np.abs(grad(res.x))) < 1e-9, res

with open(here / "glm_fixture.csv", "w") as f:
    f.write("y,x1,x2\n")
    for i in range(n):
        f.write(f"{y[i]},{x1[i]:.3f},{x2[i]:.3f}\n")

with open(here / "glm_oracle.json", "w") as f:
    json.dump({"terms": ["(Intercept)", "x1", "x2"],
               "coefficients": [float(b) for b in res.x],
               "deviance": float(2 * res.fun),
               "method": "scipy.optimize.minimize BFGS on the negative log-likelihood, gtol 1e-12"},
              f, indent=2)
    f.write("\n")
print(res.x, 2 * res.fun, y.sum())
