# coding: utf-8

# # Quorum counts and timings as organizations are added
#
# Each organization has three nodes and needs two of them. The root
# threshold follows one of two rules. Writes a TSV next to this script
# for plotting.

# In[1]:

import sys
from pathlib import Path

import numpy as np

from fbas.bench import ROOT_RULES, format_rows, log_slope, run_bench

max_orgs = int(sys.argv[1]) if len(sys.argv) > 1 else 5
rows = run_bench(range(2, max_orgs + 1), rules=list(ROOT_RULES), repeats=2)
print(format_rows(rows))


# Growth rate of the quorum count and of the enumeration time, on a log scale:

# In[2]:

for rule in ROOT_RULES:
    sel = [r for r in rows if r.rule == rule]
    xs = np.array([r.orgs for r in sel])
    print(rule, round(log_slope(xs, [r.quorums for r in sel]), 3),
          round(log_slope(xs, [r.enumerate_seconds for r in sel]), 3))


# In[3]:

out = Path(__file__).with_name("bench_growth.tsv")
out.write_text(format_rows(rows))
print(out)
