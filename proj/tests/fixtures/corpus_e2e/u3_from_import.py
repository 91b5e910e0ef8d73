from torch.linalg import lstsq


def projection(a, b):
    a = normalize(a)
    res = lstsq(a, b)
    return res
