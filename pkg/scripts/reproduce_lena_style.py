"""Registration error vs RP dimension on a red/green channel pair.

Each run sweeps the 57-angle grid on the colour fixture and records the
absolute error of the recovered angle; the table summarises each
(estimator, h, d, G) cell with Tukey box statistics.
"""
from _lattice import main

if __name__ == "__main__":
    main("lena_style", "fixtures/texture_rgb.png", __doc__)
