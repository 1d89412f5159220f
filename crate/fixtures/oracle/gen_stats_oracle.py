"""Regenerate stats_oracle.json: seeded datasets with reference results from scipy/statsmodels.

    python3 fixtures/oracle/gen_stats_oracle.py
"""
import json
import pathlib

import numpy as np
from scipy import stats
from statsmodels.stats.oneway import anova_oneway

CASES = 100
rng = np.random.default_rng(20190101)


def r6(a):
    return [round(float(v), 6) for v in a]


def groups(k, lo, hi, spread=True):
    out = []
    for _ in range(k):
        n = int(rng.integers(lo, hi + 1))
        scale = rng.uniform(0.3, 3.0) if spread else 1.0
        out.append(r6(rng.normal(rng.uniform(-1, 1), scale, n)))
    return out


def icc_case():
    n = int(rng.integers(4, 21))
    rows = []
    for _ in range(n):
        m = int(rng.integers(1, 7))
        base = rng.uniform(1.5, 4.5)
        rows.append([float(np.clip(np.round((base + rng.normal(0, 0.8)) * 4) / 4, 1, 5)) for _ in range(m)])
    if all(len(r) < 2 for r in rows):
        rows[0].append(rows[0][0] + 0.25 if rows[0][0] < 5 else 4.75)
    sizes = np.array([len(r) for r in rows], float)
    big_n = sizes.sum()
    grand = np.mean(np.concatenate(rows))
    means = np.array([np.mean(r) for r in rows])
    msb = np.sum(sizes * (means - grand) ** 2) / (n - 1)
    msw = sum(np.sum((np.array(r) - np.mean(r)) ** 2) for r in rows) / (big_n - n)
    k0 = (big_n - np.sum(sizes ** 2) / big_n) / (n - 1)
    df1, df2 = n - 1, n * (k0 - 1)
    f = msb / msw
    fl = f / stats.f.ppf(0.975, df1, df2)
    fu = f * stats.f.ppf(0.975, df2, df1)
    return {"rows": rows, "icc": 1 - 1 / f, "ci_low": 1 - 1 / fl, "ci_high": 1 - 1 / fu, "k0": k0}


def median_dev(gs):
    return [list(np.abs(np.array(g) - np.median(g))) for g in gs]


def test_dict(stat, p, df1=None, df2=None):
    d = {"statistic": float(stat), "p": float(p)}
    if df1 is not None:
        d["df1"] = float(df1)
    if df2 is not None:
        d["df2"] = float(df2)
    return d


out = {"icc": [], "bf_spread": [], "bf_means": [], "welch": [], "games_howell": [],
       "kruskal": [], "shapiro": [], "bartlett": []}

for _ in range(CASES):
    out["icc"].append(icc_case())

    gs = groups(3, 30, 30)
    res = stats.levene(*gs, center="median")
    out["bf_spread"].append({"groups": gs, **test_dict(res.statistic, res.pvalue, 2, 87)})

    gs = groups(int(rng.integers(2, 5)), 5, 25)
    res = anova_oneway(median_dev(gs), use_var="bf")
    # pvalue2/df2 carry the original Brown-Forsythe df1 = g - 1 (not Mehrotra's).
    out["bf_means"].append({"groups": gs, **test_dict(res.statistic, res.pvalue2, *res.df2)})

    gs = groups(int(rng.integers(2, 6)), 4, 25)
    res = anova_oneway(gs, use_var="unequal", welch_correction=True)
    out["welch"].append({"groups": gs, **test_dict(res.statistic, res.pvalue, res.df_num, res.df_denom)})

    gs = groups(int(rng.integers(2, 5)), 4, 20)
    k = len(gs)
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = np.array(gs[i]), np.array(gs[j])
            va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
            t = abs(a.mean() - b.mean()) / np.sqrt(va + vb)
            df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
            p = stats.studentized_range.sf(t * np.sqrt(2), k, df)
            pairs.append({"i": i, "j": j, "mean_diff": float(a.mean() - b.mean()), "df": float(df), "p": float(p)})
    out["games_howell"].append({"groups": gs, "pairs": pairs})

    gs = [[float(v) for v in np.round(g)] for g in groups(int(rng.integers(2, 5)), 3, 15)]
    res = stats.kruskal(*gs)
    out["kruskal"].append({"groups": gs, **test_dict(res.statistic, res.pvalue, len(gs) - 1)})

    n = int(rng.integers(3, 80))
    x = r6(rng.normal(0, 1, n) if rng.random() < 0.5 else rng.exponential(1, n))
    res = stats.shapiro(x)
    out["shapiro"].append({"sample": x, "w": float(res.statistic), "p": float(res.pvalue)})

    gs = groups(int(rng.integers(2, 6)), 3, 20)
    res = stats.bartlett(*gs)
    out["bartlett"].append({"groups": gs, **test_dict(res.statistic, res.pvalue, len(gs) - 1)})

path = pathlib.Path(__file__).with_name("stats_oracle.json")
path.write_text(json.dumps(out, separators=(",", ":")))
