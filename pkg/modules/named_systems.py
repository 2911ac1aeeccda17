"""
Built-in equation systems, written in the same text format as system files:
first line the alphabet, then one relator per line.
"""

from modules.errors import ParseError

COMMUTATOR = """
xy
xyXY
"""

# X Y^m X^-1 Y^-n, the equation XY^m = Y^nX
BAUMSLAG_SOLITAR_TEMPLATE = """
xy
x{y_m}X{Y_n}
"""

SYSTEM_NOTES = {
    "commutator": "x and y commute",
    "bs": (
        "Baumslag-Solitar relator x y^m X Y^-n. Coprime m, n >= 2: known testable but "
        "not stable. m = n >= 2: known not BS-rigid. Provenance notes only; nothing here "
        "verifies them."
    ),
}


def baumslag_solitar_text(m, n):
    if m < 1 or n < 1:
        raise ParseError(f"bs exponents must be positive, got m={m} n={n}")
    return BAUMSLAG_SOLITAR_TEMPLATE.format(y_m="y" * m, Y_n="Y" * n)


def named_system_text(name):
    """
    Returns the system text for a built-in name.

    :param name: "commutator", or "bs m n" (also "bs:m:n" / "bs-m-n").
    :return: System text in the file format.
    """
    tokens = name.replace(":", " ").replace("-", " ").replace("_", " ").split()
    if not tokens:
        raise ParseError("empty system name")
    if tokens[0] == "commutator" and len(tokens) == 1:
        return COMMUTATOR
    if tokens[0] == "bs" and len(tokens) == 3:
        try:
            m, n = int(tokens[1]), int(tokens[2])
        except ValueError:
            raise ParseError(f"bs expects two integers, got {name!r}") from None
        return baumslag_solitar_text(m, n)
    raise ParseError(f"unknown built-in system {name!r}")


def is_named_system(name):
    try:
        named_system_text(name)
    except ParseError:
        return False
    return True
