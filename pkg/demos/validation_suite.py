"""
Running the embedded validation suite
=====================================

The package carries its own oracle suite: dense reference Hamiltonians
built from explicit Kronecker products, brute-force partial traces, and
a measurement-grid discord optimizer.  Each check compares the fast
production path against the slow independent one.
"""

from ringladder.validate import run_suite

# quick mode drops the L=6 comparisons and shrinks the random-state
# counts; the full suite is what the test suite runs.
results = run_suite(quick=True, seed=0)

for res in results:
    print("%s %-28s %s" % ("PASS" if res.passed else "FAIL", res.name, res.detail))

passed = sum(res.passed for res in results)
print("%d/%d checks passed" % (passed, len(results)))
