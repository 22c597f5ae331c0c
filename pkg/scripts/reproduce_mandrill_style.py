"""Registration error vs RP dimension on an image/Sobel-magnitude pair."""
from _lattice import main

if __name__ == "__main__":
    main("mandrill_style", "fixtures/texture_gray.png", __doc__)
