#!/usr/bin/env python3
"""Induce a two-input program: a harder search that overfits instructively.

Seven holes (one comparison, four operators, two reals) over a spec whose
guard compares the two inputs directly.  Training is visibly unstable: rare
off-token candidates spike the population loss, and the argmax program tends
to lock into a flipped-comparison basin that fits the two negative targets
first.  The induced program approximates the spec without recovering the
generating program, which is the interesting failure mode to study here.
"""

from pathlib import Path

import sketchgrad as sg

DATA = Path(__file__).parent / "data"

sketch = sg.parse_sketch((DATA / "twovar.sketch").read_text())
truth = sg.parse_sketch((DATA / "twovar_truth.prog").read_text())

inputs = [(5.8, 2.5), (5.0, 6.2), (7.4, 6.1), (5.5, 9.4)]
spec = sg.SpecSet.from_pairs((x, sg.eval_program(truth, x)) for x in inputs)
print("specification (inputs -> output):")
for x, y in zip(spec.inputs, spec.outputs):
    print(f"  {x} -> {y}")

config = sg.TrainConfig(learning_rate=0.0995, iterations=20_000, population=50, sigma=0.5, seed=0)
result = sg.train(sketch, spec, config)

print(f"\nbest argmax MSE {result.best_loss:.4f}, final argmax MSE {result.final_loss:.4f}")
print("\ninduced program (best iterate):\n")
print(sg.print_program(result.best_program))

print("its outputs vs the spec:")
for x, y in zip(spec.inputs, spec.outputs):
    print(f"  {x}: predicted {sg.eval_program(result.best_program, x):10.4f}   target {y:10.4f}")

means = [rec.mean_population_loss for rec in result.records]
spikes = sg.loss_spikes(means, window=101, factor=3.0, start=1000)
print(f"\ninstability: {len(spikes)} iterations after 1000 spike above 3x the local median")
print(f"first few spike iterations: {spikes[:8]}")

# How good could this token pattern ever get?  Pin the reals to the learned
# means and exhaustively rank all 768 discrete combinations.
mus = [t.mu for t in result.best_thetas if isinstance(t, sg.GaussianTheta)]
ranked = sg.enumerate_discrete(sketch, mus, spec)
print(f"\nenumeration oracle at the learned reals {['%.3f' % m for m in mus]}:")
cat_holes = [h for h in sketch.holes if h.domain is not None]
for i, (assignment, loss) in enumerate(ranked[:5], start=1):
    tokens = " ".join(h.domain[assignment.values[h.index]] for h in cat_holes)
    print(f"  rank {i}: loss {loss:10.4f}  tokens [{tokens}]")
