"""Reference values used by ``validate`` and the test-suite.

Step heights are listed in increasing order for each Cantor level; the
constants ``C`` come from near-threshold power-law fits.
"""

STEPS_LEFT = {
    1: (0.60527819,),
    2: (0.37725094, 0.60254652, 0.78306819),
    3: (0.23081722, 0.37469279, 0.48515843, 0.60117033, 0.70056784, 0.78288753, 0.87276904),
}

STEPS_CENTER = {
    2: (0.73555154,),
    3: (0.50657767, 0.72992958, 0.86334249),
    4: (0.32412730, 0.50171513, 0.61794802, 0.72702487, 0.80333761, 0.86206402, 0.92098300),
}

# C_0..C_8 for the left exterior basepoint; C_0 is exact
C_LEFT = (0.900316, 0.939343, 0.977556, 1.018398, 1.061124,
          1.105679, 1.152042, 1.200444, 1.251569)
BETA_LEFT = (0.5, 0.500000, 0.500000, 0.500000, 0.500000,
             0.500002, 0.500000, 0.500001, 0.500037)

# C_1..C_8 for the center basepoint
C_CENTER = {1: 2.351932, 2: 2.395871, 3: 2.466099, 4: 2.555452,
            5: 2.655781, 6: 2.763722, 7: 2.878107, 8: 2.998958}

GROWTH_A = 0.900613
GROWTH_B = 0.041069
GROWTH_ERROR = 1.78e-6


def reference_steps(level, basepoint):
    """Reference step heights for ``(level, basepoint)``, or ``None``."""
    from .geometry import Basepoint

    bp = Basepoint.parse(basepoint)
    table = STEPS_LEFT if bp is Basepoint.LEFT_EXTERIOR else STEPS_CENTER
    return table.get(level)
