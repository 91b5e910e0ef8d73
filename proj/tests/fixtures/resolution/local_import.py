def lazy(a, b):
    import torch as t
    sol = t.lstsq(a, b)
    return sol
