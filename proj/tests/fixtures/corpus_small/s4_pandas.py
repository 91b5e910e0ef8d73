import pandas as pd


def merge_rows(data, extra):
    dt = pd.DataFrame(data)
    merged = dt.append(extra)
    return merged
