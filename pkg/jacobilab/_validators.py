from jacobilab.utils import _normalize_sign


def isvalid_sign(value: int | str):
    sign = _normalize_sign(value)
    if sign is None:
        raise ValueError("A sign of +1 or -1 is required")
    return sign


def isvalid_two_root_dim(value: int):
    if value % 2 == 1:
        raise ValueError(
            f"Two-root tensors do not exist in odd dimension {value}; choose an even dimension of at least 6."
        )
    if value < 6:
        raise ValueError(f"Two-root models need an even dimension of at least 6. Found {value}")
    return value
