"""Independent SAT oracle for the test suite.

A deliberately simple DPLL solver plus a DIMACS reader, written without
looking at the package's CDCL implementation: no watched literals, no
learning, no activity heuristics.  Slow but obviously correct, which is the
point of an oracle.
"""


def parse_dimacs(text):
    """Returns (num_vars, clauses).  Accepts comment lines and the usual
    zero-terminated clause format, including clauses split over lines."""
    num_vars = 0
    clauses = []
    current = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            assert parts[:2] == ["p", "cnf"], f"not a cnf problem line: {line}"
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    return num_vars, clauses


def dpll(clauses, assignment=None):
    """Returns a satisfying assignment dict (var -> bool) or None."""
    assignment = dict(assignment or {})
    clauses = [list(c) for c in clauses]

    while True:
        # unit propagation by repeated full scans
        changed = False
        simplified = []
        for clause in clauses:
            unassigned = []
            satisfied = False
            for lit in clause:
                val = assignment.get(abs(lit))
                if val is None:
                    unassigned.append(lit)
                elif (lit > 0) == val:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not unassigned:
                return None  # conflict
            if len(unassigned) == 1:
                lit = unassigned[0]
                assignment[abs(lit)] = lit > 0
                changed = True
            simplified.append(unassigned)
        clauses = simplified
        if not changed:
            break

    if not clauses:
        return assignment
    lit = clauses[0][0]
    for choice in (True, False):
        trial = dict(assignment)
        trial[abs(lit)] = (lit > 0) == choice
        model = dpll(clauses, trial)
        if model is not None:
            return model
    return None


def solve_dimacs(text):
    """(verdict string, model or None) for a DIMACS instance."""
    num_vars, clauses = parse_dimacs(text)
    model = dpll(clauses)
    if model is None:
        return "UNSATISFIABLE", None
    for v in range(1, num_vars + 1):
        model.setdefault(v, False)
    return "SATISFIABLE", model


def check_model(clauses, model):
    return all(any(model.get(abs(lit), False) == (lit > 0) for lit in c)
               for c in clauses)
