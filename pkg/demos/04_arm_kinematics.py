"""The six-joint arm on its own: forward kinematics, Jacobian conditioning
and damped-least-squares velocity tracking around a circle.
"""

import numpy as np

from cocosim import ArmModel, JointState, fk_position, ik_dls, integrate, jacobian
from cocosim.kinematics import twist_vector

arm = ArmModel()
print("DH rows (a, alpha, d, offset):")
for row in arm.dh_rows:
    print("   ", tuple(round(x, 4) for x in row))

home = fk_position(arm, arm.q_home)
sv = np.linalg.svd(jacobian(arm, arm.q_home), compute_uv=False)
print(f"\nhome EE position: {np.round(home, 4)}")
print(f"Jacobian singular values at home: {np.round(sv, 3)}")

# trace a 10 cm circle in the horizontal plane at 0.1 m/s
dt = 0.01
radius, speed = 0.10, 0.10
omega = speed / radius
state = JointState.at(arm.q_home)
center = home - np.array([radius, 0, 0])
errs = []
path = []
for k in range(int(2 * np.pi / omega / dt)):
    t = k * dt
    p = fk_position(arm, state.q)
    path.append(p)
    want = center + radius * np.array([np.cos(omega * t), np.sin(omega * t), 0])
    v = omega * radius * np.array([-np.sin(omega * t), np.cos(omega * t), 0])
    v = v + 2.0 * (want - p)  # small proportional correction
    qd = ik_dls(arm, state.q, twist_vector(v, np.zeros(3)))
    state = integrate(arm, state, qd, dt)
    errs.append(np.linalg.norm(p - want))

errs = np.array(errs)
print(f"\ncircle tracking over one revolution: mean error "
      f"{errs.mean()*1000:.2f} mm, max {errs.max()*1000:.2f} mm")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = np.array(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(path[:, 0], path[:, 1])
    ax1.set_aspect("equal")
    ax1.set_xlabel("x [m]")
    ax1.set_ylabel("y [m]")
    ax1.set_title("EE path (top view)")
    ax2.plot(np.arange(len(errs)) * dt, errs * 1000)
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("tracking error [mm]")
    ax2.set_title("circle-following error")
    fig.tight_layout()
    fig.savefig("demos/output/kinematics_circle.png", dpi=120)
    print("plot saved to demos/output/kinematics_circle.png")
except ImportError:
    pass
