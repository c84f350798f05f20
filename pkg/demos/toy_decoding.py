"""Walk through random binning and intersection decoding on an 8 x 4 x 8 toy cube.

The BS forms 4 beams at once, the user 2 and the RIS 2, so each slot senses
a bin of 16 blocks and one round scans the whole cube in 16 slots. The
strongest bin of every round is intersected with the others until (usually)
one block is left.

    python demos/toy_decoding.py [seed]
"""

import sys

from risbeam.config import build_spec
from risbeam.harness import run_decode_demo

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 2
trace = run_decode_demo(build_spec("decode-demo", {}, seed=seed, noiseless=True))
print(trace.text)
if trace.candidates_remaining > 1:
    print(f"{trace.candidates_remaining} blocks survived every round; one was picked at random.")
