"""
netlearn — topology and epoch-count optimization for distributed learning.

Package structure:
    lib.base           — BaseScript abstract class (logging, timing, CLI, exit codes)
    lib.config         — Settings from NETLEARN_* environment variables / .env
    lib.errors         — NetLearnError hierarchy
    lib.models         — Typed dataclasses (nodes, edges, selections, results)
    lib.topology       — Validation, spectral gap, dataset sizes
    lib.stochastic     — Grid engine for epoch-duration laws
    lib.closed_forms   — Exponential and uniform closed-form learning times
    lib.learning       — Error law, epoch count, cost, evaluate()
    lib.profiling      — Fit of the error-law coefficients
    lib.evaluator      — Memoised, thread-pooled evaluate()
    lib.regular        — Cheap d-regular L-L subgraphs
    lib.optimize       — DoubleClimb, Opt-Unif, GA, brute force
    lib.simulate       — Monte Carlo simulator and Gantt traces
    lib.scenario       — Random reference-scenario instances
    lib.serialization  — Instance/profile/solution JSON, CSV row streams
"""
