"""Time-optimal synthesis for x' = (F + u G) x on the sphere, |u| <= 1.

Modules: so3_kinematics (rotations), extremal_flow (bang extremals and
switching curves), front_engine (fronts at times k pi), pendulum_synthesis
(the planar limit), cut_locus_solver (overlap curve near the south pole),
limit_case_analysis (regimes r = C alpha and r = 0), oracle (brute-force
ground truth) and cli.
"""

__version__ = "0.1.0"
