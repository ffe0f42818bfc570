"""JSON helpers shared by the command line and the suites."""
import json
from importlib import resources

from .errors import ClarkError


def load_json(path):
    """Parse a JSON file; malformed or missing input raises ClarkError."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ClarkError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ClarkError(f"malformed JSON in {path}: {e.msg} (line {e.lineno})") from e


def dumps(obj):
    """Stable text form: sorted keys, fixed indentation, no NaN."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path=None, stream=None):
    text = dumps(obj)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text


def default_manifest():
    text = resources.files("clarklab").joinpath("data/default_manifest.json").read_text("utf-8")
    return json.loads(text)
