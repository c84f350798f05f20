"""Average achievable rate versus SNR for every training method on a small system.

A 32-antenna BS serves a single-antenna user through an 8 x 8 RIS. The
hierarchical search is also run with repeated measurements so that it spends
about 1024 slots. Pass a trial count to trade run time for smoothness;
``--csv`` prints the raw CSV instead of the table.

    python demos/rate_sweep.py [trials] [--csv]
"""

import sys

from risbeam.config import build_spec
from risbeam.harness import rows_to_csv, run_rate_curve

args = [a for a in sys.argv[1:] if not a.startswith("--")]
trials = int(args[0]) if args else 200
values = dict(
    n_t=32, n_r=1, m_y=8, m_z=8, r_bs=8, r_ue=1, q=16, rounds=4,
    snr_db_list=(-15.0, -10.0, -5.0, 0.0, 5.0),
    methods=("full-csi", "exhaustive", "multidirectional", "hierarchical"),
    hier_budget_slots=1024,
)
rows = run_rate_curve(build_spec("rate-curve", values, trials=trials, seed=1))

if "--csv" in sys.argv:
    sys.stdout.write(rows_to_csv(rows))
    sys.exit()

methods = list(dict.fromkeys(r.method for r in rows))
slots = {r.method: r.slots_used for r in rows}
print("snr_db " + " ".join(f"{m:>20}" for m in methods))
print("slots  " + " ".join(f"{slots[m]:>20}" for m in methods))
for snr in values["snr_db_list"]:
    cells = [next(r for r in rows if r.method == m and r.snr_db == snr) for m in methods]
    print(f"{snr:6g} " + " ".join(f"{c.value:13.2f} ± {c.stderr:4.2f}" for c in cells))
