"""How many slots each method needs, and how many binning rounds are enough.

Prints the slot counts of the three training methods for a 32 x 32 x 256
system and the predicted probability that the binning decoder recovers the
dominant block as the number of rounds grows.
"""

from risbeam.analysis import overhead, predict_success, required_rounds
from risbeam.system import SystemConfig

system = SystemConfig(32, 32, 16, 16, r_bs=4, r_ue=4, q=32, rounds=4)

for method in ("exhaustive", "hierarchical", "multidirectional"):
    rep = overhead(method, system)
    print(f"{method:>16}: {rep.slots:>7} slots   {rep.formula}")

print("\nrounds  slots  p_poisson  p_exact  single-candidate")
for rounds in range(1, 8):
    p = predict_success(system, rounds)
    slots = overhead("multidirectional", system, rounds=rounds).slots
    print(f"{rounds:>6}  {slots:>5}  {p.p_poisson:9.4f}  {p.p_exact:7.4f}  {p.p_unique:16.4f}")

for target in (0.9, 0.99, 0.999):
    req = required_rounds(system, target)
    print(f"target {target}: L = {req.rounds} (log2 of the largest axis is {req.log_reference:g})")
