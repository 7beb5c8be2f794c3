"""cocosim: a deterministic human-robot collaboration sandbox.

A simulated six-joint arm shares a tabletop with a scripted (or live)
human. A particle filter tracks which fixture region the human is heading
for and whether they want to guide the robot by hand; a supervisor
switches the arm between autonomous waypoint work with human-repulsive
avoidance and compliant, admittance-based manual guidance.
"""

from .coexist import (AssemblyStatus, CoexistParams, WaypointPlan,
                      attractive_velocity, coexist_command, monitor_assembly,
                      plan_goal_waypoints, plan_guided_waypoints,
                      repulsive_velocity)
from .cooperate import (AdmittanceParams, AdmittanceState, activate_guidance,
                        admittance_step, approach_velocity, detect_contact,
                        guidance_finished)
from .core import (ConfigError, ControllerFault, GuidanceFault, Pose, Rng,
                   SimClock, Twist, Wrench, gaussian3, saturate, vec3)
from .intention import (COOPERATE, FilterParams, FilterState, GoalRegion,
                        IntentionBelief, init_filter, label_name,
                        mle_intention, predicted_velocity, step_filter)
from .kinematics import (ArmModel, JointState, fk, fk_position, ik_dls,
                         integrate, jacobian)
from .runner import (Metrics, ScenarioConfig, SimSession, TraceRecord,
                     compute_metrics, load_config, load_config_file,
                     read_trace, run_scenario, write_trace)
from .supervisor import (Mode, SupervisorState, SwitchParams, smooth,
                         supervise_step, transition)
from .world import (AlignPart, Dwell, Guide, HumanScript, MoveTo, PartState,
                    ReachForEE, RecoverPart, Release, WaitFor, WorldState,
                    commit_assembly, environment_force, init_world, world_step)

__version__ = "0.1.0"
