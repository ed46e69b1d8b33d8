"""Bundled inputs: two public-domain excerpts and a synthetic trace.

The synthetic pair (synthetic.trace + synthetic.txt) is generated by
tools/make_fixtures.py from streamcode.synthetic and is the deterministic
workload the acceptance suite runs against.
"""

from importlib import resources
from pathlib import Path

NAMES = (
    "moby_dick.txt",
    "pride_and_prejudice.txt",
    "synthetic.trace",
    "synthetic.txt",
)


def fixture_path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {', '.join(NAMES)}")
    path = Path(str(resources.files(__package__).joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(
            f"fixture {name} missing; run tools/make_fixtures.py"
        )
    return path
