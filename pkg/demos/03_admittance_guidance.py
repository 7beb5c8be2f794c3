"""Admittance control by itself: push on the virtual mass-damper and watch
the velocity respond, then let go and watch the release timer fire.
"""

import numpy as np

from cocosim import AdmittanceParams, Wrench, activate_guidance, vec3
from cocosim.cooperate import admittance_step, guidance_finished

params = AdmittanceParams()
dt = 0.001

print(f"virtual dynamics: M={params.mass} kg, D={params.damping} N*s/m "
      f"(time constant {params.mass/params.damping:.2f} s)")

# constant 5 N push for one second
state = activate_guidance()
vs = []
for _ in range(1000):
    state, cmd = admittance_step(state, Wrench(vec3(5, 0, 0), vec3()), dt, params)
    vs.append(state.v[0])
print(f"after 1 s of 5 N: v = {vs[-1]:.4f} m/s "
      f"(analytic steady state F/D = {5/params.damping:.4f})")

# release: force drops into the deadband, the dwell timer runs out
released_at = None
vs_release = []
for k in range(1000):
    state, cmd = admittance_step(state, Wrench.zero(), dt, params)
    vs_release.append(state.v[0])
    if released_at is None and guidance_finished(state, params):
        released_at = k * dt
print(f"zero contact sustained for {params.t_release} s -> release detected "
      f"at t = {released_at:.3f} s after letting go")
print(f"velocity decayed to {vs_release[-1]:.5f} m/s")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = np.arange(2000) * dt
    v = np.array(vs + vs_release)
    ref = (5 / params.damping) * (1 - np.exp(-params.damping * t[:1000] / params.mass))
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(t, v, label="simulated v(t)")
    ax.plot(t[:1000], ref, "k:", label="analytic (F/D)(1-e^{-Dt/M})")
    ax.axvline(1.0, color="gray", lw=0.5)
    ax.annotate("force removed", (1.0, v.max() * 0.9), fontsize=8)
    ax.axvline(1.0 + released_at, color="red", lw=0.5)
    ax.annotate("release detected", (1.0 + released_at, v.max() * 0.5),
                fontsize=8, color="red")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("velocity [m/s]")
    ax.legend()
    ax.set_title("admittance step response and zero-contact release")
    fig.tight_layout()
    fig.savefig("demos/output/admittance_response.png", dpi=120)
    print("plot saved to demos/output/admittance_response.png")
except ImportError:
    pass
