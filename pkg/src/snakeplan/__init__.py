"""Lorentz/Mobius group decompositions and horizontal motion planning for
spherical snake configurations."""

from .lorentz import (
    LieElement,
    Membership,
    basis_Omega,
    basis_U,
    block_l1_norm,
    boost_decompose,
    bracket,
    classify,
    embed,
    embed_lie,
    exp_h,
    factorize,
    kak_decompose,
    log_boost,
    lorentz_product,
    pseudo_adjoint,
)
from .planner import (
    ConfigPath,
    GroupPath,
    act,
    boost_leg,
    commutator_probe,
    horizontal_lift,
    infinitesimal_action,
    plan_group_path,
    rotation_leg,
    steer_config,
    su11_geodesic,
)
from .rotations import RotationBlocks, skew_spectral, so_exp_blocks, so_log
from .snake import (
    SnakeConfig,
    critical_radii,
    differential_endpoint,
    endpoint,
    fit_horizontal,
    gram_data,
    horizontal_gradient,
    is_singular,
    snake_curve,
)
from .sphere import (
    INFINITY,
    bracket_rotation_flow,
    grad_phi,
    hyperbolic_distance,
    lorentz_to_hyperbolic,
    mobius_sphere_action,
    reflect_plane,
    reflect_sphere,
    stereographic,
    stereographic_inv,
    xi_bracket,
    xi_field,
)

__version__ = "0.1.0"
