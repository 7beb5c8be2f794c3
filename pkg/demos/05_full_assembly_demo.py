"""The whole story in one run: four-part assembly with a hidden failure and
a human-guided recovery.

The human aligns parts in the order top-left, bottom-left, top-right,
bottom-right. The first alignment is secretly bad; the robot's push there
completes (by its own wrench monitoring) but assembles nothing. The human
notices, fixes the part, reaches for the tool - the coexisting robot first
evades, then recognizes the cooperation intent, lets itself be grabbed,
and is guided to the repaired part, where it redoes the push.
"""

import numpy as np

from cocosim import run_scenario, write_trace
from cocosim.scenarios import coco_demo

trace, metrics = run_scenario(coco_demo())

print("event log:")
prev_mode = None
prev_assembled = [False] * 4
prev_aligned = [False] * 4
prev_misaligned = [False] * 4
prev_done = 0
for r in trace:
    t = f"t={r.t:6.2f}s"
    if r.mode != prev_mode:
        print(f"  {t}  mode -> {r.mode}")
        prev_mode = r.mode
    for i in range(4):
        if r.parts_misaligned[i] and not prev_misaligned[i]:
            print(f"  {t}  part {i} placed MISALIGNED (invisible to the robot)")
        if r.parts_aligned[i] and not prev_aligned[i]:
            print(f"  {t}  part {i} aligned by the human")
        if r.parts_assembled[i] and not prev_assembled[i]:
            print(f"  {t}  part {i} ASSEMBLED")
    if r.assemblies_done > prev_done:
        print(f"  {t}  robot finished push #{r.assemblies_done}")
        prev_done = r.assemblies_done
    prev_assembled = list(r.parts_assembled)
    prev_aligned = list(r.parts_aligned)
    prev_misaligned = list(r.parts_misaligned)

print("\nmetrics:")
for key, val in metrics.to_dict().items():
    print(f"  {key}: {val}")

write_trace(trace, "demos/output/coco_demo_trace.jsonl")
print("\ntrace written to demos/output/coco_demo_trace.jsonl")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = np.array([r.t for r in trace])
    ee = np.array([r.ee_position for r in trace])
    hand = np.array([r.hand_obs for r in trace])
    coop = np.array([r.cooperation_prob for r in trace])
    mode_idx = np.array([{"COEXIST": 0, "APPROACH": 1, "GUIDED": 2}[r.mode]
                         for r in trace])

    fig, axes = plt.subplots(3, 1, figsize=(10, 8), sharex=True)
    axes[0].plot(t, ee[:, 2], label="EE z")
    axes[0].plot(t, hand[:, 2], alpha=0.6, label="hand z")
    axes[0].set_ylabel("height [m]")
    axes[0].legend(fontsize=8)
    axes[0].set_title("golden assembly run")

    axes[1].plot(t, coop, "k")
    axes[1].set_ylabel("P(cooperate)")
    axes[1].axhline(0.6, color="green", lw=0.5)
    axes[1].axhline(0.3, color="red", lw=0.5)

    axes[2].step(t, mode_idx, where="post")
    axes[2].set_yticks([0, 1, 2], ["COEXIST", "APPROACH", "GUIDED"])
    axes[2].set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig("demos/output/full_assembly.png", dpi=120)
    print("plot saved to demos/output/full_assembly.png")
except ImportError:
    pass
