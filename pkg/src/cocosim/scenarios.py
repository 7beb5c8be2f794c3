"""Built-in scenario configurations.

coco_demo is the golden four-region assembly run: the human aligns parts
top-left, bottom-left, top-right, bottom-right; the first alignment is
secretly bad, the robot's push there fails without it noticing, and the
human later recovers the part and manually guides the robot to redo the
push. evasion_demo drives the hand at a robot whose mode switch is
suppressed, to exercise the repulsive field on its own.
"""

from __future__ import annotations

from .runner import ScenarioConfig, parse_config

# region centers sit at the part tops (z = part height)
_TL = [0.55, 0.20, 0.02]
_BL = [0.35, 0.20, 0.02]
_TR = [0.55, -0.20, 0.02]
_BR = [0.35, -0.20, 0.02]
_RADIUS = 0.06

# standoff where the hand waits without influencing the arm (> d0 from all
# regions)
_PARK = [0.45, 0.55, 0.10]

_TL_HOVER = [0.55, 0.20, 0.14]


def goal_blocks() -> list:
    return [
        {"id": 0, "center": _TL, "radius": _RADIUS},
        {"id": 1, "center": _BL, "radius": _RADIUS},
        {"id": 2, "center": _TR, "radius": _RADIUS},
        {"id": 3, "center": _BR, "radius": _RADIUS},
    ]


def coco_demo_dict(seed: int = 7) -> dict:
    """Golden demo; the human paces themselves on the robot's pushes."""
    centers = [_TL, _BL, _TR, _BR]
    phases = []
    for rid, center in enumerate(centers):
        move = {"kind": "move_to", "target": center, "speed": 0.25}
        if rid > 0:
            phases.append({"kind": "move_to", "target": _PARK, "speed": 0.3})
            move["wait_for"] = {"kind": "pushed", "region_id": rid - 1}
        phases.append(move)
        phases.append({"kind": "align_part", "region_id": rid, "duration": 1.2})
    phases += [
        {"kind": "move_to", "target": _PARK, "speed": 0.3},
        {"kind": "move_to", "target": _TL, "speed": 0.3,
         "wait_for": {"kind": "pushed", "region_id": 3}},
        {"kind": "recover_part", "region_id": 0, "duration": 1.2},
        {"kind": "reach_for_ee", "speed": 0.35},
        {"kind": "dwell", "duration": 0.4},
        {"kind": "guide", "path": [_TL_HOVER], "speed": 0.25},
        {"kind": "release", "duration": 0.1},
        {"kind": "move_to", "target": _PARK, "speed": 0.35},
        {"kind": "dwell", "duration": 2.0},
    ]
    return {
        "seed": seed,
        "dt": 0.01,
        "duration": 120.0,
        "goals": goal_blocks(),
        "script": {
            "phases": phases,
            "hand_start": _PARK,
            "hand_noise_sigma": 0.003,
            "grasp_stiffness": 120.0,
        },
        "failure_injections": [0],
    }


def evasion_demo_dict(seed: int = 3, k_rep: float = 0.02) -> dict:
    """Hand chases the arm while mode switching is suppressed (t_on huge),
    so only the repulsive field keeps the distance open. k_rep=0 is the
    ablation."""
    phases = [
        {"kind": "move_to", "target": _TL, "speed": 0.25},
        {"kind": "align_part", "region_id": 0, "duration": 1.0},
        {"kind": "move_to", "target": _PARK, "speed": 0.3},
        {"kind": "reach_for_ee", "speed": 0.18,
         "wait_for": {"kind": "pushed", "region_id": 0}},
        {"kind": "dwell", "duration": 3.0},
    ]
    return {
        "seed": seed,
        "dt": 0.01,
        "duration": 14.0,
        "goals": goal_blocks(),
        "coexist": {"k_rep": k_rep},
        "switch": {"t_on": 1.0e6},
        "script": {
            "phases": phases,
            "hand_start": _PARK,
            "hand_noise_sigma": 0.003,
        },
        "failure_injections": [],
    }


def coco_demo(seed: int = 7) -> ScenarioConfig:
    return parse_config(coco_demo_dict(seed))


def evasion_demo(seed: int = 3, k_rep: float = 0.02) -> ScenarioConfig:
    return parse_config(evasion_demo_dict(seed, k_rep))
