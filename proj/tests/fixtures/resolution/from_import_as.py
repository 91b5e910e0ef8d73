from numpy import alltrue as at


def verify(flags):
    ok = at(flags)
    return ok
