"""
Physical and numerical constants.

This module defines the fixed parameters of the force-state representation,
the synthetic contact model and the default hyperparameters shared by the
learning and control modules.
"""

import math

# Force state layout
POSE_COUNT = 5
CHANNELS_PER_POSE = 3
STATE_DIM = 2 * POSE_COUNT * CHANNELS_PER_POSE  # 15 force dims, then 15 torque dims
FORCE_DIMS = POSE_COUNT * CHANNELS_PER_POSE
ACTION_DIM = 2
TILT_DELTA_DEG = 30.0

# Unit conversions
MM_TO_M = 1.0e-3
DEGREES_TO_RADIANS = math.pi / 180.0

# Contact model
DEFAULT_F_MAX_N = 10.0
FRICTION_COEFFICIENT = 0.3
EDGE_BAND_MM = 0.5
DESCENT_TOLERANCE_MM = 1.0e-4
SDF_GRADIENT_STEP_MM = 1.0e-6
DEFAULT_FOOTPRINT_RESOLUTION = 3.0  # points per mm
MIN_FOOTPRINT_POINTS = 64

# Sensor noise (order of the sensor resolutions: 1/160 N, 1/2000 N*m)
DEFAULT_FORCE_NOISE_N = 0.05
DEFAULT_TORQUE_NOISE_NM = 0.002

# Hole geometry
DEFAULT_CLEARANCE_MM = 1.0
DEFAULT_PLATE_THICKNESS_MM = 3.0
DEFAULT_FLOOR_DEPTH_MM = 15.0
DEFORMABLE_ELASTICITY = 5.0
RIGID_ELASTICITY = 50.0
TRAINING_SIZES_MM = (10.0, 20.0, 30.0)
TESTING_SIZE_MM = 15.0

# Grid sampling
DEFAULT_GRID_N = 9
DEFAULT_GRID_RANGE_MM = 4.0
DEFAULT_TRAJECTORY_STEPS = 10

# Dynamics model
DEFAULT_HIDDEN_SIZE = 64
DEFAULT_LEARNING_RATE = 1.0e-3
FINETUNE_LR_SCALE = 0.1
GRADIENT_CLIP_NORM = 5.0
NORM_STD_FLOOR = 1.0e-6
TORQUE_ERROR_WEIGHT = 100.0
HELD_OUT_TRAJECTORIES = 20

# Planner
DEFAULT_CEM_SAMPLES = 200
DEFAULT_CEM_HORIZON = 6
DEFAULT_CEM_ITERS = 5
DEFAULT_ELITE_FRAC = 0.1
DEFAULT_CEM_INIT_STD_MM = 2.0
CEM_STD_FLOOR_MM = 0.01
CEM_CLIP_SIGMAS = 3.0
COST_ALPHA = 0.05
COST_BETA = 1.0
DEFAULT_MAX_STEPS = 6
DEFAULT_SUCCESS_RADIUS_MM = 0.5
START_RING_RADIUS_MM = 2.0
START_RING_SPREAD_MM = 0.5

# Reinforcement learning
GOAL_REWARD = 1.0
STEP_REWARD = -0.02
SUCCESS_THRESHOLD = 0.9
DISCOUNT = 0.95
ENTROPY_WEIGHT = 0.01
VALUE_LOSS_WEIGHT = 0.5
RL_EPISODE_HORIZON = 10
