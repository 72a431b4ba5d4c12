"""A small CDCL SAT solver.

Literals are nonzero integers: variable v appears positively as v and
negatively as -v.  The solver is incremental: clauses and learned clauses
persist across solve() calls, and solve() accepts a list of assumption
literals that hold only for that call.

The search is entirely deterministic (fixed seed 0, documented here for the
record: no randomness is actually consulted): decisions pick the unassigned
variable with the highest activity, ties broken toward the lowest variable
number, with saved-phase polarity defaulting to false.  Restarts follow the
Luby sequence with a base interval of 64 conflicts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

SEED = 0  # fixed; kept so the determinism contract has a name

SATISFIABLE = "SATISFIABLE"
UNSATISFIABLE = "UNSATISFIABLE"


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    solve_time: float = 0.0


@dataclass
class SolverResult:
    verdict: str
    model: dict | None  # variable -> bool, total over allocated variables
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def is_sat(self):
        return self.verdict == SATISFIABLE


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby restart sequence."""
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i = i - (1 << (k - 1)) + 1


class Solver:
    def __init__(self):
        self.nvars = 0
        self.clauses = []          # original clauses
        self.learnts = []
        self.watches = {}          # literal -> clauses with that literal watched
        self.values = [0]          # 1 true, -1 false, 0 unassigned; [var]
        self.levels = [0]
        self.reasons = [None]
        self.phase = [False]
        self.activity = [0.0]
        self.var_inc = 1.0
        self.trail = []
        self.trail_lim = []        # trail length at each decision level
        self.qhead = 0
        self.ok = True
        self.stats = SolverStats()

    # -- variables ---------------------------------------------------------
    def new_var(self) -> int:
        self.nvars += 1
        self.values.append(0)
        self.levels.append(0)
        self.reasons.append(None)
        self.phase.append(False)
        self.activity.append(0.0)
        self.watches.setdefault(self.nvars, [])
        self.watches.setdefault(-self.nvars, [])
        return self.nvars

    def value(self, lit: int) -> int:
        v = self.values[abs(lit)]
        return v if lit > 0 else -v

    @property
    def level(self) -> int:
        return len(self.trail_lim)

    # -- clause management -------------------------------------------------
    def add_clause(self, lits):
        if not self.ok:
            return
        for lit in lits:
            if not 1 <= abs(lit) <= self.nvars:
                raise ValueError(f"literal {lit} references unallocated variable")
        assert self.level == 0
        seen = set()
        clause = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit in seen or self.value(lit) == -1:
                continue  # duplicate, or false at top level
            if self.value(lit) == 1:
                return  # satisfied at top level
            seen.add(lit)
            clause.append(lit)
        if not clause:
            self.ok = False
            return
        if len(clause) == 1:
            self.enqueue(clause[0], None)
            if self.propagate() is not None:
                self.ok = False
            return
        self.clauses.append(clause)
        self.watch(clause)

    def watch(self, clause):
        self.watches[-clause[0]].append(clause)
        self.watches[-clause[1]].append(clause)

    # -- assignment --------------------------------------------------------
    def enqueue(self, lit, reason):
        var = abs(lit)
        self.values[var] = 1 if lit > 0 else -1
        self.levels[var] = self.level
        self.reasons[var] = reason
        self.phase[var] = lit > 0
        self.trail.append(lit)

    def cancel_until(self, level):
        if self.level <= level:
            return
        mark = self.trail_lim[level]
        for lit in self.trail[mark:]:
            self.values[abs(lit)] = 0
            self.reasons[abs(lit)] = None
        del self.trail[mark:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            watching = self.watches[p]
            self.watches[p] = []
            for n, clause in enumerate(watching):
                if clause[0] == -p:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) == 1:
                    self.watches[p].append(clause)
                    continue
                for k in range(2, len(clause)):
                    if self.value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[-clause[1]].append(clause)
                        break
                else:
                    self.watches[p].append(clause)
                    if self.value(clause[0]) == -1:
                        self.watches[p].extend(watching[n + 1:])
                        return clause
                    self.enqueue(clause[0], clause)
        return None

    # -- conflict analysis -------------------------------------------------
    def bump(self, var):
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.nvars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def analyze(self, conflict):
        """First-UIP learning.  Returns (learnt clause, backjump level)."""
        learnt = []
        seen = set()
        counter = 0
        p = None
        index = len(self.trail) - 1
        reason = conflict
        bt_level = 0
        while True:
            start = 0 if p is None else 1  # reason[0] is p itself
            for q in reason[start:]:
                var = abs(q)
                if var in seen or self.levels[var] == 0:
                    continue
                seen.add(var)
                self.bump(var)
                if self.levels[var] >= self.level:
                    counter += 1
                else:
                    learnt.append(q)
                    bt_level = max(bt_level, self.levels[var])
            while abs(self.trail[index]) not in seen:
                index -= 1
            p = self.trail[index]
            index -= 1
            seen.discard(abs(p))
            counter -= 1
            if counter == 0:
                break
            reason = self.reasons[abs(p)]
        learnt.insert(0, -p)
        # place a literal of the backjump level second for watching
        for k in range(1, len(learnt)):
            if self.levels[abs(learnt[k])] == bt_level:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return learnt, bt_level

    # -- search ------------------------------------------------------------
    def decide_var(self):
        best = 0
        best_act = -1.0
        for v in range(1, self.nvars + 1):
            if self.values[v] == 0 and self.activity[v] > best_act:
                best, best_act = v, self.activity[v]
        return best

    def search(self, assumptions, restart_cap):
        conflicts_here = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if self.level == 0:
                    self.ok = False
                    return UNSATISFIABLE
                learnt, bt_level = self.analyze(conflict)
                self.cancel_until(bt_level)
                if len(learnt) == 1:
                    self.enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watch(learnt)
                    self.enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                continue
            if conflicts_here >= restart_cap and self.level > len(assumptions):
                self.cancel_until(0)
                return None  # restart
            if self.level < len(assumptions):
                p = assumptions[self.level]
                if self.value(p) == -1:
                    return UNSATISFIABLE
                self.trail_lim.append(len(self.trail))
                if self.value(p) == 0:
                    self.enqueue(p, None)
                continue
            var = self.decide_var()
            if var == 0:
                return SATISFIABLE
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self.enqueue(var if self.phase[var] else -var, None)

    def solve(self, assumptions=()) -> SolverResult:
        start = time.perf_counter()
        self.cancel_until(0)
        status = UNSATISFIABLE if not self.ok else None
        restarts = 0
        while status is None:
            restarts += 1
            status = self.search(list(assumptions), 64 * luby(restarts))
        model = None
        if status == SATISFIABLE:
            model = {v: self.values[v] == 1 for v in range(1, self.nvars + 1)}
            self.check_model(model)
        self.cancel_until(0)
        self.stats.solve_time += time.perf_counter() - start
        return SolverResult(status, model, self.stats)

    def check_model(self, model):
        for clause in self.clauses:
            if not any(model[abs(l)] == (l > 0) for l in clause):
                raise AssertionError(f"model does not satisfy clause {clause}")
