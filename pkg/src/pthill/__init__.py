"""Band spectrum of the Hill operator with the PT-symmetric optical potential
4cos^2 x + 4iV sin 2x, computed through the isospectral Mathieu form 2a cos 2x."""

__version__ = "0.1.0"
