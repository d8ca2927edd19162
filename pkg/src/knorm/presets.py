"""Named field specs and extension elements for the command line.

Presets keep golden tests readable: acceptance runs refer to "Q2" and
"--a 2" instead of digit lists.
"""

FIELD_PRESETS: dict[str, dict] = {
    # the 2-adic rationals
    "Q2": {"p": 2, "steps": []},
    # ramified quadratic: adjoin a square root of 2
    "Q2sqrt2": {"p": 2, "steps": [{"kind": "eisenstein", "coeffs": [-2, 0]}]},
    # unramified quadratic over Q2
    "Q2unram2": {"p": 2, "steps": [{"kind": "unramified", "degree": 2}]},
    # the 3-adic rationals with a primitive cube root of unity
    "Q3zeta3": {"p": 3, "steps": [{"kind": "eisenstein", "coeffs": [3, 3]}]},
    # the 5-adic rationals with a primitive fifth root of unity
    "Q5zeta5": {"p": 5, "steps": [{"kind": "eisenstein", "coeffs": [5, 10, 10, 5]}]},
}
