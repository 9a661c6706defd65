"""Standard Delzant polytopes (2pi-units, lexicographically smallest vertex at 0)."""

from .delzant import from_facets


def cp1():
    return from_facets([(1,), (-1,)], [0, 1], "CP1")


def cp2():
    return from_facets([(1, 0), (0, 1), (-1, -1)], [0, 0, 1], "CP2")


def square():
    """CP1 x CP1, the square [0, 2pi]^2."""
    return from_facets([(1, 0), (0, 1), (-1, 0), (0, -1)], [0, 0, 1, 1], "CP1xCP1")


def hirzebruch(a, top=1, bottom=None):
    """Hirzebruch trapezoid with slanted normal (-1, -a)."""
    bottom = a + top if bottom is None else bottom
    return from_facets([(0, 1), (1, 0), (0, -1), (-1, -a)], [0, 0, top, bottom], f"H{a}")


def h1():
    return hirzebruch(1, 1, 2)


def h2():
    return hirzebruch(2, 1, 3)


def cp3():
    return from_facets([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)], [0, 0, 0, 1], "CP3")


def cube():
    normals = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    return from_facets(normals, [0, 0, 0, 1, 1, 1], "CP1^3")


LIBRARY = {
    "cp1": cp1,
    "cp2": cp2,
    "square": square,
    "h1": h1,
    "h2": h2,
}

EXTRA = {
    "cp3": cp3,
    "cube": cube,
}


def get(name):
    table = {**LIBRARY, **EXTRA}
    return table[name.lower()]()
