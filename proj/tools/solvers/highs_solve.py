#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and write a name/value solution file.

usage: highs_solve.py MODEL.mps SOLUTION.txt [TIME_LIMIT_S] [REL_GAP]

After the MIP solve, integer columns are fixed at their rounded values and
the remaining LP is re-solved, so continuous values are exactly consistent
with the reported binaries.
"""
import math
import sys

import highspy


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    mps, sol = argv[1], argv[2]
    time_limit = float(argv[3]) if len(argv) > 3 else 600.0
    gap = float(argv[4]) if len(argv) > 4 else 0.0

    h = highspy.Highs()
    h.setOptionValue("time_limit", time_limit)
    h.setOptionValue("mip_rel_gap", gap)
    h.setOptionValue("mip_abs_gap", 0.0 if gap == 0.0 else 1e-6)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    h.setOptionValue("threads", 1)
    if h.readModel(mps) != highspy.HighsStatus.kOk:
        print("cannot read " + mps, file=sys.stderr)
        return 3
    h.run()

    ms = h.getModelStatus()
    info = h.getInfo()
    S = highspy.HighsModelStatus
    has_sol = info.primal_solution_status == 2
    if ms == S.kOptimal:
        status = "optimal"
    elif ms == S.kInfeasible:
        status = "infeasible"
    elif ms in (S.kTimeLimit, S.kIterationLimit, S.kSolutionLimit, S.kInterrupt):
        status = "time_limit"
    elif has_sol:
        status = "feasible"
    else:
        status = "error"

    lp = h.getLp()
    names = list(lp.col_names_)
    bound = getattr(info, "mip_dual_bound", float("nan"))
    lines = ["STATUS " + status]
    if has_sol and status != "infeasible":
        x = list(h.getSolution().col_value)
        integrality = list(lp.integrality_) if len(lp.integrality_) else []
        ints = [j for j, kind in enumerate(integrality)
                if kind == highspy.HighsVarType.kInteger]
        if ints:
            # Polish: fix integers and re-solve the LP.
            for j in ints:
                v = float(round(x[j]))
                h.changeColIntegrality(j, highspy.HighsVarType.kContinuous)
                h.changeColBounds(j, v, v)
            h.setOptionValue("time_limit", max(10.0, time_limit))
            h.run()
            if h.getModelStatus() == S.kOptimal:
                x = list(h.getSolution().col_value)
                for j in ints:
                    x[j] = float(round(x[j]))
        obj = sum(c * v for c, v in zip(lp.col_cost_, x)) + lp.offset_
        lines.append("OBJECTIVE " + repr(float(obj)))
        if math.isfinite(bound):
            lines.append("BOUND " + repr(float(min(bound, obj))))
        lines += ["%s %r" % (n, float(v)) for n, v in zip(names, x)]
    elif math.isfinite(bound):
        lines.append("BOUND " + repr(float(bound)))
    with open(sol, "w") as f:
        f.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
