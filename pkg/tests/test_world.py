from __future__ import annotations

import numpy as np
import pytest

from cocosim.core import ConfigError, Rng, vec3
from cocosim.intention import GoalRegion
from cocosim.world import (AlignPart, Dwell, Guide, HumanScript, MoveTo,
                           ReachForEE, RecoverPart, WaitFor, commit_assembly,
                           environment_force, init_world, world_step)

GOALS = [GoalRegion(0, vec3(0.5, 0.2, 0.02), 0.06),
         GoalRegion(1, vec3(0.3, -0.2, 0.02), 0.06)]
DT = 0.01


def quiet_script(phases, sigma=0.0, **kw):
    return HumanScript(phases=tuple(phases), hand_start=vec3(0.4, 0.4, 0.1),
                       hand_noise_sigma=sigma, **kw)


def run_world(world, script, ee, n, rng=None, dt=DT):
    rng = rng or Rng(0)
    hand_obs = wrench = None
    for _ in range(n):
        world, hand_obs, wrench = world_step(world, script, ee, dt, rng)
    return world, hand_obs, wrench


class TestPhases:
    def test_dwell_static_hand_no_noise(self):
        script = quiet_script([Dwell(duration=5.0)])
        w = init_world(GOALS, script)
        w, hand_obs, wrench = run_world(w, script, vec3(0.9, 0.9, 0.9), 10)
        assert np.array_equal(hand_obs, script.hand_start)
        assert np.array_equal(wrench.force, vec3())

    def test_move_advances_along_line(self):
        target = vec3(1.4, 0.4, 0.1)  # 1 m away in x
        script = quiet_script([MoveTo(target=target, speed=0.5)])
        w = init_world(GOALS, script)
        w, hand_obs, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 1)
        assert np.allclose(hand_obs, script.hand_start + [0.005, 0, 0],
                           atol=1e-12)

    def test_hand_speed_never_exceeds_phase_speed(self):
        script = quiet_script([MoveTo(target=vec3(0.6, 0.1, 0.0), speed=0.3),
                               ReachForEE(speed=0.2),
                               Dwell(duration=1.0)])
        w = init_world(GOALS, script)
        rng = Rng(1)
        prev = w.hand.copy()
        ee = vec3(0.0, 0.0, 0.3)
        speeds = {MoveTo: 0.3, ReachForEE: 0.2, Dwell: 0.0}
        for _ in range(600):
            phase = script.phases[min(w.phase_index, len(script.phases) - 1)]
            cap = speeds[type(phase)]
            w, _, _ = world_step(w, script, ee, DT, rng)
            step = np.linalg.norm(w.hand - prev)
            assert step <= cap * DT + 1e-9
            prev = w.hand.copy()

    def test_align_sets_aligned_after_duration(self):
        script = quiet_script([AlignPart(region_id=0, duration=0.5)])
        w = init_world(GOALS, script)
        w, _, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 49)
        assert not w.parts[0].aligned
        w, _, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 1)
        assert w.parts[0].aligned
        assert not w.parts[0].misaligned_failure

    def test_injected_failure_consumed_on_first_align(self):
        script = quiet_script([AlignPart(region_id=0, duration=0.1),
                               RecoverPart(region_id=0, duration=0.1)])
        w = init_world(GOALS, script, failure_injections=[0])
        w, _, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 10)
        assert w.parts[0].misaligned_failure
        assert not w.parts[0].aligned
        w, _, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 10)
        assert w.parts[0].aligned
        assert not w.parts[0].misaligned_failure

    def test_wait_for_gates_phase(self):
        script = quiet_script([
            MoveTo(target=vec3(0.6, 0.4, 0.1), speed=0.5,
                   wait_for=WaitFor("pushed", 0)),
        ])
        w = init_world(GOALS, script)
        w, hand_obs, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 20)
        assert np.array_equal(hand_obs, script.hand_start)  # gated, holding
        w = commit_assembly(w, GOALS[0].center, 0)
        w, hand_obs, _ = run_world(w, script, vec3(0.9, 0.9, 0.9), 20)
        assert hand_obs[0] > script.hand_start[0]

    def test_completed_script_holds_hand(self):
        script = quiet_script([Dwell(duration=0.05)])
        w = init_world(GOALS, script)
        w, a, wr = run_world(w, script, vec3(0.9, 0.9, 0.9), 200)
        assert w.phase_index == 1
        assert np.array_equal(a, script.hand_start)
        assert np.array_equal(wr.force, vec3())

    def test_phase_progression_monotone(self):
        script = quiet_script([Dwell(duration=0.02), Dwell(duration=0.02),
                               Dwell(duration=0.02)])
        w = init_world(GOALS, script)
        seen = []
        rng = Rng(0)
        for _ in range(20):
            w, _, _ = world_step(w, script, vec3(1, 1, 1), DT, rng)
            seen.append(w.phase_index)
        assert seen == sorted(seen)


class TestGuidePhase:
    def test_grasp_spring_toward_path_point(self):
        # engaged grasp, hand 0.1 m from the EE: clamped spring force
        # min(k*0.1, f_max) pulls toward the hand's path position
        script = quiet_script([Guide(path=(vec3(1.0, 0.4, 0.1),), speed=0.25)],
                              grasp_stiffness=60.0, grasp_force_max=15.0)
        w = init_world(GOALS, script)
        ee = script.hand_start.copy()  # .04 within grasp radius: latches
        rng = Rng(0)
        # let the hand walk 0.1 m along +x
        for _ in range(40):
            w, _, wrench = world_step(w, script, ee, DT, rng)
        d = np.linalg.norm(w.hand - ee)
        assert d == pytest.approx(0.1, abs=1e-9)
        assert np.allclose(wrench.force, [60.0 * 0.1, 0, 0], atol=1e-9)

    def test_force_clamped_at_max(self):
        script = quiet_script([Guide(path=(vec3(2.0, 0.4, 0.1),), speed=0.5)],
                              grasp_stiffness=60.0, grasp_force_max=15.0)
        w = init_world(GOALS, script)
        ee = script.hand_start.copy()
        rng = Rng(0)
        for _ in range(200):
            w, _, wrench = world_step(w, script, ee, DT, rng)
        assert np.linalg.norm(wrench.force) == pytest.approx(15.0, abs=1e-9)

    def test_no_latch_when_far(self):
        script = quiet_script([Guide(path=(vec3(1.0, 0.4, 0.1),), speed=0.25)])
        w = init_world(GOALS, script)
        rng = Rng(0)
        w, _, wrench = world_step(w, script, vec3(2, 2, 2), DT, rng)
        assert not w.grasp_latched
        assert np.array_equal(wrench.force, vec3())


class TestEnvironmentForce:
    def make_world(self, **kw):
        script = quiet_script([Dwell(duration=1.0)])
        return init_world(GOALS, script, **kw)

    def test_above_top_zero(self):
        w = self.make_world()
        w.parts[0].aligned = True
        f = environment_force(w, GOALS[0].center + vec3(0, 0, 0.01))
        assert np.array_equal(f.force, vec3())

    def test_spring_law(self):
        w = self.make_world()
        w.parts[0].aligned = True
        f = environment_force(w, GOALS[0].center - vec3(0, 0, 0.003))
        assert np.allclose(f.force, [0, 0, 4000 * 0.003], atol=1e-9)

    def test_misaligned_part_pushes_air(self):
        w = self.make_world()
        w.parts[0].misaligned_failure = True
        f = environment_force(w, GOALS[0].center - vec3(0, 0, 0.01))
        assert np.array_equal(f.force, vec3())

    def test_empty_region_no_force(self):
        w = self.make_world()
        f = environment_force(w, GOALS[0].center - vec3(0, 0, 0.01))
        assert np.array_equal(f.force, vec3())

    def test_outside_radius_no_force(self):
        w = self.make_world()
        w.parts[0].aligned = True
        ee = GOALS[0].center + vec3(GOALS[0].radius + 0.01, 0, -0.01)
        f = environment_force(w, ee)
        assert np.array_equal(f.force, vec3())


class TestWrenchQuiet:
    def test_zero_wrench_outside_interaction(self):
        # no grasp and the EE above every part top: wrench must be zero,
        # whatever the part states are
        rng = np.random.default_rng(4)
        script = quiet_script([Dwell(duration=10.0)])
        w = init_world(GOALS, script)
        w.parts[0].aligned = True
        w.parts[1].misaligned_failure = True
        r = Rng(2)
        for _ in range(200):
            ee = vec3(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                      rng.uniform(0.021, 0.8))
            w, _, wrench = world_step(w, script, ee, DT, r)
            assert np.array_equal(wrench.force, vec3())
            assert np.array_equal(wrench.torque, vec3())


class TestCommit:
    def test_aligned_part_assembles(self):
        w = init_world(GOALS, quiet_script([Dwell(duration=1.0)]))
        w.parts[0].aligned = True
        w = commit_assembly(w, GOALS[0].center, 0)
        assert w.parts[0].assembled
        assert w.parts[0].pushed

    def test_misaligned_part_fails_silently(self):
        w = init_world(GOALS, quiet_script([Dwell(duration=1.0)]))
        w.parts[0].misaligned_failure = True
        w = commit_assembly(w, GOALS[0].center, 0)
        assert not w.parts[0].assembled
        assert w.parts[0].pushed

    def test_idempotent(self):
        w = init_world(GOALS, quiet_script([Dwell(duration=1.0)]))
        w.parts[1].aligned = True
        w = commit_assembly(w, GOALS[1].center, 1)
        w = commit_assembly(w, GOALS[1].center, 1)
        assert w.parts[1].assembled

    def test_unknown_region_rejected(self):
        w = init_world(GOALS, quiet_script([Dwell(duration=1.0)]))
        with pytest.raises(ConfigError):
            commit_assembly(w, vec3(), 7)


class TestDeterminism:
    def test_bit_identical_with_zero_sigma(self):
        script = quiet_script([MoveTo(target=vec3(0.5, 0.2, 0.02), speed=0.25),
                               AlignPart(region_id=0, duration=0.3),
                               Dwell(duration=0.5)])
        states = []
        for _ in range(2):
            w = init_world(GOALS, script)
            rng = Rng(5)
            hands = []
            for _ in range(300):
                w, hand_obs, wrench = world_step(w, script, vec3(0.2, 0, 0.3),
                                                 DT, rng)
                hands.append((hand_obs.tobytes(), wrench.force.tobytes()))
            states.append(hands)
        assert states[0] == states[1]

    def test_override_bypasses_script(self):
        script = quiet_script([MoveTo(target=vec3(1.4, 0.4, 0.1), speed=0.5)])
        w = init_world(GOALS, script)
        rng = Rng(0)
        ov = vec3(0.7, 0.7, 0.2)
        w, hand_obs, _ = world_step(w, script, vec3(0, 0, 0.3), DT, rng,
                                    hand_override=ov)
        assert np.array_equal(hand_obs, ov)  # sigma 0: exactly the override
        assert np.array_equal(w.hand, script.hand_start)  # script frozen
        assert w.phase_index == 0

    def test_script_resumes_after_override(self):
        script = quiet_script([MoveTo(target=vec3(1.4, 0.4, 0.1), speed=0.5)])
        w = init_world(GOALS, script)
        rng = Rng(0)
        for _ in range(5):
            w, _, _ = world_step(w, script, vec3(0, 0, 0.3), DT, rng,
                                 hand_override=vec3(0.7, 0.7, 0.2))
        w, hand_obs, _ = world_step(w, script, vec3(0, 0, 0.3), DT, rng)
        assert np.allclose(hand_obs, script.hand_start + [0.005, 0, 0],
                           atol=1e-12)


class TestScriptValidation:
    def test_requires_phases(self):
        with pytest.raises(ConfigError):
            HumanScript(phases=())

    def test_rejects_bad_speed(self):
        with pytest.raises(ConfigError):
            quiet_script([MoveTo(target=vec3(), speed=0.0)])

    def test_unknown_injection_region(self):
        with pytest.raises(ConfigError):
            init_world(GOALS, quiet_script([Dwell(duration=1.0)]),
                       failure_injections=[9])
