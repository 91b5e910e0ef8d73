import numpy


def all_finite(values):
    arr = numpy.asarray(values)
    ok = numpy.all(arr < 1e9)
    return ok
