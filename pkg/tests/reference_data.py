"""Reference numbers for the PUMA example used by several tests."""

PUMA_TD = [
    [-0.15720, 0.97938, 0.12682, -1.68074],
    [-0.59374, -0.19635, 0.78032, 1.33902],
    [0.78914, 0.04737, 0.61237, -4.83022],
]

# eight joint-angle sets in degrees, printed to five decimals
PUMA_POSES_DEG = [
    (-287.08771, 130.00008, -191.92745, -6.78054, -66.24462, 4.13687),
    (29.99995, 49.99992, 39.99994, -135.00007, -119.99981, -120.00010),
    (29.99995, 148.48625, -191.92745, 142.01103, 95.78709, -151.06756),
    (-287.08771, 31.51375, 39.99994, 18.00641, 159.53838, 18.33206),
    (-287.08771, 130.00008, -191.92745, 173.21946, 66.24462, -175.86313),
    (29.99995, 148.48625, -191.92745, -37.98897, -95.78709, 28.93244),
    (29.99995, 49.99992, 39.99994, 44.99993, 119.99981, 59.99990),
    (-287.08771, 31.51375, 39.99994, -161.99359, -159.53838, -161.66794),
]
