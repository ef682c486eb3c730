"""Published coordinates for the three worked instances."""

import math

SPHERE_DUAL = (0.9502828628898, 1.06207786194864, 0.30646555192966)
SPHERE_Y = (2.161477484004744, 1.696777196962463, 0.67004643869564)
SPHERE_Z = (4.215492495576614, 3.309195489378083, 1.306780086728456)

ELLIPSOID_DUAL = (0.84101802234162, 1.493808342458642, 0.12912817444352)
ELLIPSOID_Y = (-1.121270493506938, -0.83025443673537, 0.66262025515374)
ELLIPSOID_Z = (-4.091279940255224, -4.009023330835817, 1.807730500535487)
# Unsorted, as printed; the closed-form cubic roots below reproduce them.
ELLIPSOID_BETA = (3.460811127, 2.324869129, 6.214319743)
ELLIPSOID_I_PLUS_LAM_A = (3.910604529727413, 2.955256837074665, 6.226354900456345)
ELLIPSOID_G = (3.664931769065526, 2.525304438283014, 6.42737358375643)

SYMMETRIC_Y = (0.5872184947, 0.8094284647)
SYMMETRIC_Z = (1.012757759, 1.395996491)

# k -> (dual point, y, z) for f = (sqrt(6)/96, 1/k).
PERTURBATION_TABLE = {
    64: ((0.2284381, 5.319007, -0.0219068), (0.2250312, 0.9743515), (0.2764370, 1.1969306)),
    1000: ((0.6926569, 16.01863, -0.0248297), (0.5656039, 0.8246770), (0.9573734, 1.3958953)),
    10000: ((0.7214940, 16.42599, -0.0254434), (0.5850814, 0.8109745), (1.0072142, 1.3960878)),
    100000: ((0.7243521, 16.46345, -0.0255083), (0.5870050, 0.8095833), (1.0122034, 1.3960066)),
}


def ellipsoid_beta_closed_form():
    """Eigenvalues of [[3,1,1],[1,4,1],[1,1,5]] by the trigonometric cubic formula."""
    theta = math.acos(3 * math.sqrt(3) / 8)
    k = 4 / math.sqrt(3)
    return (
        k * math.cos(4 * math.pi / 3 + theta / 3) + 4,
        k * math.cos(2 * math.pi / 3 + theta / 3) + 4,
        k * math.cos(theta / 3) + 4,
    )
