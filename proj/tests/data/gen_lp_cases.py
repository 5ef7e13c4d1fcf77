#!/usr/bin/env python3
"""Generates random bounded LPs and solves them with scipy (HiGHS),
freezing the optimal objectives into lp_cases.inc for the C++ tests."""
import numpy as np
from scipy.optimize import linprog

rng = np.random.default_rng(20240817)

cases = []
attempts = 0
while len(cases) < 60 and attempts < 2000:
    attempts += 1
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 10))
    c = np.round(rng.uniform(-5, 5, n), 3)
    A = np.round(rng.uniform(-4, 4, (m, n)), 3)
    A[rng.random((m, n)) < 0.35] = 0.0
    b = np.round(rng.uniform(-6, 10, m), 3)
    senses = rng.choice(["<=", ">=", "=="], m, p=[0.5, 0.3, 0.2])
    lb = np.round(rng.uniform(-3, 0, n), 3)
    ub = np.round(lb + rng.uniform(0.5, 8, n), 3)
    # occasional free / one-sided bounds
    lb[rng.random(n) < 0.15] = -np.inf
    ub[rng.random(n) < 0.15] = np.inf

    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i, s in enumerate(senses):
        if s == "<=":
            A_ub.append(A[i]); b_ub.append(b[i])
        elif s == ">=":
            A_ub.append(-A[i]); b_ub.append(-b[i])
        else:
            A_eq.append(A[i]); b_eq.append(b[i])
    res = linprog(c, A_ub=np.array(A_ub) if A_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(A_eq) if A_eq else None,
                  b_eq=np.array(b_eq) if b_eq else None,
                  bounds=list(zip(lb, ub)), method="highs")
    if res.status == 0:
        status, obj = "optimal", res.fun
    elif res.status == 2:
        status, obj = "infeasible", 0.0
    elif res.status == 3:
        status, obj = "unbounded", 0.0
    else:
        continue
    cases.append((n, m, c, A, senses, b, lb, ub, status, obj))

def fmt(x):
    if np.isposinf(x):
        return "INF"
    if np.isneginf(x):
        return "-INF"
    return repr(float(x))

with open("lp_cases.inc", "w") as f:
    f.write("// generated by gen_lp_cases.py; reference optima from scipy/HiGHS\n")
    f.write(f"static const LpCase kLpCases[] = {{\n")
    for (n, m, c, A, senses, b, lb, ub, status, obj) in cases:
        f.write("  {%d, %d,\n" % (n, m))
        f.write("   {%s},\n" % ", ".join(fmt(x) for x in c))
        f.write("   {%s},\n" % ", ".join("{%s}" % ", ".join(fmt(x) for x in row) for row in A))
        f.write("   {%s},\n" % ", ".join('"%s"' % s for s in senses))
        f.write("   {%s},\n" % ", ".join(fmt(x) for x in b))
        f.write("   {%s},\n" % ", ".join(fmt(x) for x in lb))
        f.write("   {%s},\n" % ", ".join(fmt(x) for x in ub))
        f.write('   "%s", %s},\n' % (status, fmt(obj)))
    f.write("};\n")
print(f"wrote {len(cases)} cases")
