"""
Parameter sweeps
================

The same knobs the ``ablate`` command sweeps, driven from Python: the
termination age of the baseline tracker and the association gate of the
immortal one. Longer memory means fewer identity switches; a stricter
gate breaks trajectories apart.

Runs a few minutes on the full 100-object scenario, so a smaller one is used.
"""

from immortrack import io
from immortrack.cli import ablate, format_ablation
from immortrack.simulate import ScenarioConfig, generate

cfg = io.RunConfig(scenario=ScenarioConfig(seed=3, num_objects=40, num_frames=150, world_extent=600.0))
sc = generate(cfg.scenario)

print(format_ablation("a_max", ablate(sc.detections, sc.gt, cfg, "a_max", [2, 5, 10, 20, 50])))
print(format_ablation("gate", ablate(sc.detections, sc.gt, cfg, "gate", [0.1, 0.3, 0.5])))
