#!/usr/bin/env python3
"""Minimal NDJSON detector used to check protocol conformance.

Reads {"id", "path"} lines on stdin and answers {"id", "score"} per line.
The score is a squashed high-frequency energy of the grayscale image when
Pillow is installed, and a hash of the file bytes otherwise.
"""

import hashlib
import json
import sys

try:
    from PIL import Image, ImageFilter
except ImportError:  # pragma: no cover
    Image = None


def score(path):
    if Image is None:
        with open(path, "rb") as f:
            digest = hashlib.sha256(f.read()).digest()
        return int.from_bytes(digest[:4], "little") / 2**32
    with Image.open(path) as img:
        edges = img.convert("L").filter(ImageFilter.FIND_EDGES)
        data = edges.tobytes()
    energy = sum(v * v for v in data) / max(len(data), 1)
    return energy / (energy + 1000.0)


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        print(json.dumps({"id": req["id"], "score": score(req["path"])}), flush=True)


if __name__ == "__main__":
    main()
