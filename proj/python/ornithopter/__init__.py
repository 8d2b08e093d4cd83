"""Python bindings for the ornithopter flapping-wing simulator."""

from ._core import (  # noqa: F401
    AeroModel,
    BodyState,
    ForceDecomposition,
    Morphology,
    Vehicle,
    __version__,
    closure_residual,
    decompose_forces,
    default_dragonfly,
    dragonfly_hover_kinematics,
    dragonfly_hover_pitch,
    evaluate_hover,
    exp_so3,
    hat,
    load_config,
    mass_matrix,
    random_state_xi,
    run_validation,
    step_reduced,
    simulate_reduced,
    wing_loads_at,
)
