"""Watch the intention filter follow a wandering human hand.

The hand heads for goal 1, changes its mind halfway and goes to goal 3,
then finally reaches toward the robot's end-effector. The filter's belief
follows each change within a fraction of a second of simulated time.
"""

import numpy as np

from cocosim import FilterParams, GoalRegion, init_filter, label_name, step_filter

DT = 0.01

goals = [
    GoalRegion(0, np.array([0.55, 0.20, 0.02]), 0.06),
    GoalRegion(1, np.array([0.35, 0.20, 0.02]), 0.06),
    GoalRegion(2, np.array([0.55, -0.20, 0.02]), 0.06),
    GoalRegion(3, np.array([0.35, -0.20, 0.02]), 0.06),
]
ee = np.array([0.45, 0.0, 0.35])
params = FilterParams()

# script the hand: goal 1 for 1.2 s, goal 3 for 1.2 s, then the EE
hand = np.array([0.45, 0.0, 0.10])
targets = [(goals[1].center, 120), (goals[3].center, 120), (ee, 120)]
positions = [hand.copy()]
for target, steps in targets:
    for _ in range(steps):
        d = target - positions[-1]
        dist = np.linalg.norm(d)
        if dist < 1e-9:
            positions.append(positions[-1].copy())
            continue
        positions.append(positions[-1] + min(params.model_speed * DT, dist) * d / dist)

state = init_filter(goals, params, seed=42)
history = []
for pos in positions:
    state, belief = step_filter(state, pos, ee, DT)
    history.append(belief)

print("t[s]   belief bars (goal0..goal3, cooperate)          MLE")
for k in range(0, len(history), 30):
    b = history[k]
    bars = " ".join(f"{p:4.2f}" for p in b.probs)
    print(f"{k*DT:5.2f}  [{bars}]  {label_name(b.mle)}")

changes = [(0, history[0].mle)]
for k, b in enumerate(history):
    if b.mle != changes[-1][1]:
        changes.append((k, b.mle))
print("\nMLE timeline:")
for k, mle in changes:
    print(f"  t={k*DT:5.2f}s -> {label_name(mle)}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    probs = np.array([b.probs for b in history])
    t = np.arange(len(history)) * DT
    fig, ax = plt.subplots(figsize=(8, 4))
    for i in range(4):
        ax.plot(t, probs[:, i], label=f"goal {i}")
    ax.plot(t, probs[:, 4], "k--", label="cooperate")
    for edge in (1.2, 2.4):
        ax.axvline(edge, color="gray", lw=0.5)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("posterior probability")
    ax.legend(ncol=3, fontsize=8)
    ax.set_title("intention belief while the hand changes targets")
    fig.tight_layout()
    fig.savefig("demos/output/intention_tracking.png", dpi=120)
    print("\nplot saved to demos/output/intention_tracking.png")
except ImportError:
    pass
