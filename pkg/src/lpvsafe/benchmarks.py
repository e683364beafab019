"""Reference problems: a two-mode motivating example and a numerical example.

``sec5`` is a two-mode plant with a short, identification-poor record;
``sec6`` is an open-loop unstable plant with an input bound. Values are the
four-digit reference figures.
"""
from __future__ import annotations

import numpy as np

from .csets import InputConstraintSet, PolyhedralCSet
from .data import DataMatrices, build_matrices
from .lpv import GainSchedule, PolytopicLPV, simulate

# shared safe set: a parallelogram with vertices (+-2, -+3.5), (+-6, -+0.5)
SAFE_SET_F = np.array([
    [1 / 5, 2 / 5],
    [-1 / 5, -2 / 5],
    [-3 / 20, 1 / 5],
    [3 / 20, -1 / 5],
])


def safe_set() -> PolyhedralCSet:
    return PolyhedralCSet(SAFE_SET_F)


# ---- sec5: motivating example --------------------------------------------

SEC5_A1 = np.array([[0.4, 0.0], [0.0, -0.1]])
SEC5_A2 = np.array([[-0.3, 0.0], [1.0, 0.1]])
SEC5_B = np.array([[0.0], [1.0]])
SEC5_X0 = np.array([1.0, 1.0])
SEC5_U0 = np.array([[0.63, 0.812, -0.75, 0.83, 0.265]])
SEC5_W0 = np.array([
    [0.0488, 0.1392, 0.2734, 0.4788, 0.4824],
    [0.9512, 0.8608, 0.7266, 0.5212, 0.5176],
])

# As printed. The entry 0.0058 (column 3 of X0, column 2 of X1) carries the
# wrong sign: the printed XW is built from -0.0058 and re-simulation gives
# -0.00585. ``SEC5_X0_DATA``/``SEC5_X1_DATA`` hold the corrected values.
SEC5_X0_PRINTED = np.array([
    [1.0, -0.2659, 0.0538, 0.0058, -0.0002],
    [1.0, 1.6709, 0.7033, -0.675, 0.8208],
])
SEC5_X1_PRINTED = np.array([
    [-0.2659, 0.0538, 0.0058, -0.0002, 0.0],
    [1.6709, 0.7033, -0.675, 0.8208, 0.2675],
])
SEC5_SIGN_ERRATA = (("X0", 0, 3), ("X1", 0, 2))
SEC5_X0_DATA = SEC5_X0_PRINTED.copy()
SEC5_X0_DATA[0, 3] = -0.0058
SEC5_X1_DATA = SEC5_X1_PRINTED.copy()
SEC5_X1_DATA[0, 2] = -0.0058
SEC5_XW_PRINTED = np.array([
    [0.0488, -0.037, 0.0147, -0.0028, -0.0001],
    [0.0488, 0.2327, 0.1923, -0.3232, 0.396],
    [0.9512, -0.2288, 0.0391, -0.003, -0.0001],
    [0.9512, 1.4382, 0.511, -0.3519, 0.4248],
])
SEC5_GAIN = np.array([[-0.5, -0.1, -0.8687, 0.175]])
SEC5_G = np.array([
    [-5.63, -0.0744, 1.2847, 0.0745],
    [-12.76, -0.5156, 0.2298, 0.4952],
    [67.57, -1.315, -4.784, 1.143],
    [67.88, -1.4725, -5.7252, 0.7227],
    [30.78, 2.274, -2.642, 0.2248],
])
SEC5_LAMBDA = 0.95


def sec5_system() -> PolytopicLPV:
    return PolytopicLPV((SEC5_A1, SEC5_A2), SEC5_B)


def sec5_data() -> DataMatrices:
    """The reference record with the sign erratum applied and XW as printed."""
    return DataMatrices(U0=SEC5_U0, X0=SEC5_X0_DATA, X1=SEC5_X1_DATA, W0=SEC5_W0, XW=SEC5_XW_PRINTED)


def sec5_fixture() -> DataMatrices:
    """Full-precision record: printed ``U0``, ``x(0)`` and ``W0`` run through the plant.

    Unlike the printed four-digit matrices this record satisfies the data
    equation exactly, so ``X1 G = A_{1,s} + B K_{1,s}`` holds to rounding.
    """
    return build_matrices(simulate(sec5_system(), SEC5_U0.T, SEC5_X0, SEC5_W0.T))


def sec5_gains() -> GainSchedule:
    return GainSchedule.from_stacked(SEC5_GAIN, 2)


# ---- sec6: numerical example ---------------------------------------------

SEC6_A1 = np.array([[1.0, 2 / 3], [-2 / 6, 1.0]])
SEC6_A2 = np.array([[4 / 5, 2 / 5], [-2 / 5, 6 / 5]])
SEC6_B = np.array([[0.0], [1.0]])
SEC6_LAMBDA = 0.84
SEC6_INPUT_BOUND = 8.0
SEC6_T = 6
SEC6_DATA_GAIN = np.array([[0.3056, -0.3889, 0.2389, -0.5889]])
SEC6_MODEL_GAIN = np.array([[0.2680, -0.8398, 0.4722, -0.4556]])


def sec6_system() -> PolytopicLPV:
    return PolytopicLPV((SEC6_A1, SEC6_A2), SEC6_B)


def sec6_input_set() -> InputConstraintSet:
    return InputConstraintSet.box([SEC6_INPUT_BOUND])


def sec6_model_gains() -> GainSchedule:
    return GainSchedule.from_stacked(SEC6_MODEL_GAIN, 2)


def sec6_data_gains() -> GainSchedule:
    return GainSchedule.from_stacked(SEC6_DATA_GAIN, 2)
