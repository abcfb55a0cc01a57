#!/usr/bin/env python3
"""External solver adapter: reads an LP file, solves it with HiGHS via
scipy.optimize.milp, and writes the `STATUS\\n(name value)*` solution file.

Usage: lp_solve_highs.py problem.lp solution.sol

Understands the LP dialect this project emits (Maximize/Minimize, Subject To,
Bounds, Generals, Binaries). Intended as a drop-in backend:

    qebcheck verify ... --solver-cmd "python3 tools/lp_solve_highs.py {lp} {sol}"
"""

import re
import sys

import numpy as np
from scipy import optimize, sparse


def tokenize_terms(expr):
    """'2 x - 0.5 y + z' -> [(coef, var), ...]; coefficients are explicit."""
    tokens = expr.replace("+", " + ").replace("-", " - ").split()
    terms, sign, coef = [], 1.0, None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                value = float(tok)
                coef = sign * value
            except ValueError:
                terms.append((coef if coef is not None else sign, tok))
                sign, coef = 1.0, None
    return terms


def parse_lp(path):
    sense = 1  # minimize
    objective, rows, bounds = [], [], {}
    integers, binaries = set(), set()
    section = None
    pending = []

    def flush():
        if not pending:
            return
        row = " ".join(pending)
        pending.clear()
        name, rest = row.split(":", 1)
        m = re.search(r"(<=|>=|=)", rest)
        lhs, op, rhs = rest[: m.start()], m.group(1), float(rest[m.end():])
        rows.append((name.strip(), tokenize_terms(lhs), op, rhs))

    with open(path) as f:
        for raw in f:
            line = raw.rstrip("\n")
            s = line.strip()
            if not s or s.startswith("\\"):
                continue
            if s in ("Maximize", "Minimize"):
                sense = -1 if s == "Maximize" else 1
                section = "obj"
                continue
            if s == "Subject To":
                section = "st"
                continue
            if s in ("Bounds", "Generals", "Binaries", "End"):
                flush()
                section = s.lower()
                if s == "End":
                    break
                continue
            if section == "obj":
                expr = s.split(":", 1)[1] if ":" in s else s
                objective.extend(tokenize_terms(expr))
            elif section == "st":
                if ":" in s:
                    flush()
                pending.append(s)
            elif section == "bounds":
                parts = s.split()
                if len(parts) == 3 and parts[1] == "=":
                    v = float(parts[2])
                    bounds[parts[0]] = (v, v)
                else:  # lo <= name <= hi
                    bounds[parts[2]] = (float(parts[0]), float(parts[4]))
            elif section == "generals":
                integers.update(s.split())
            elif section == "binaries":
                binaries.update(s.split())
    return sense, objective, rows, bounds, integers, binaries


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    sense, objective, rows, bounds, integers, binaries = parse_lp(lp_path)

    names = []
    seen = set()

    def touch(var):
        if var not in seen:
            seen.add(var)
            names.append(var)

    for _, terms, _, _ in rows:
        for _, var in terms:
            touch(var)
    for _, var in objective:
        touch(var)
    for var in list(bounds) + sorted(integers) + sorted(binaries):
        touch(var)

    index = {v: i for i, v in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for coef, var in objective:
        c[index[var]] += sense * coef

    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    for var, (lo, hi) in bounds.items():
        lb[index[var]], ub[index[var]] = lo, hi
    for var in binaries:
        lb[index[var]] = max(lb[index[var]], 0.0)
        ub[index[var]] = min(ub[index[var]], 1.0)

    integrality = np.zeros(n)
    for var in integers | binaries:
        integrality[index[var]] = 1

    a_rows, b_l, b_u = [], [], []
    for _, terms, op, rhs in rows:
        row = np.zeros(n)
        for coef, var in terms:
            row[index[var]] += coef
        a_rows.append(row)
        b_l.append(rhs if op in (">=", "=") else -np.inf)
        b_u.append(rhs if op in ("<=", "=") else np.inf)

    constraints = (
        optimize.LinearConstraint(sparse.csr_matrix(np.array(a_rows)), b_l, b_u)
        if a_rows
        else ()
    )
    res = optimize.milp(
        c,
        constraints=constraints,
        bounds=optimize.Bounds(lb, ub),
        integrality=integrality,
    )

    with open(sol_path, "w") as out:
        if res.status == 0:
            out.write("OPTIMAL\n")
            for v, x in zip(names, res.x):
                # snap integral variables so downstream validation sees integers
                if integrality[index[v]]:
                    x = round(x)
                out.write(f"{v} {x:.17g}\n")
        elif res.status == 2:
            out.write("INFEASIBLE\n")
        elif res.status == 1:
            out.write("TIMEOUT\n")
        else:
            out.write(f"ERROR {res.status}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
